//! Leading-term sorts `lt_n = K*/(1 + nM) ∪ {0}` and residue rings
//! `res_n = O/nM`.
//!
//! Since `M = pO`, the sort for `n` only depends on `m = v_p(n)`: an element
//! of `lt_{p^m}` is a valuation `γ` together with a unit class modulo
//! `p^{m+1}`. Only those sorts are materialised; [`level_of_index`] maps an
//! arbitrary index `n` to its level.
//!
//! The angular component uses the section `γ ↦ p^γ`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Val};
use crate::witt::{RingDesc, WittNum};

/// The level `m = v_p(n)` representing the sort `lt_n`.
pub fn level_of_index(n: u64, p: u64) -> u32 {
    assert!(n > 0, "sort indices are positive");
    let mut n = n;
    let mut m = 0;
    while n.is_multiple_of(p) {
        n /= p;
        m += 1;
    }
    m
}

fn check_level(ring: &RingDesc, level: u32) -> Result<()> {
    if level + 1 > ring.precision() {
        Err(Error::InsufficientPrecision {
            needed: level as i64 + 1,
            available: ring.precision(),
        })
    } else {
        Ok(())
    }
}

/// An element of `lt_{p^m}`.
#[derive(Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    level: u32,
    /// `None` encodes `0_n`.
    class: Option<(i64, WittNum)>,
    ring: Arc<RingDesc>,
}

impl LeadingTerm {
    pub fn zero(ring: &Arc<RingDesc>, level: u32) -> LeadingTerm {
        LeadingTerm {
            level,
            class: None,
            ring: Arc::clone(ring),
        }
    }

    /// The class of `unit · p^gamma`. `unit` must be a unit.
    pub fn from_parts(gamma: i64, unit: &WittNum, level: u32) -> Result<LeadingTerm> {
        check_level(unit.ring(), level)?;
        if !unit.is_unit() {
            return Err(Error::InvalidParameters(format!("{unit} is not a unit")));
        }
        Ok(LeadingTerm {
            level,
            class: Some((gamma, unit.truncate(level + 1))),
            ring: Arc::clone(unit.ring()),
        })
    }

    /// `ltf_n(x)`.
    pub fn of(x: &WittNum, level: u32) -> Result<LeadingTerm> {
        let ring = x.ring();
        check_level(ring, level)?;
        let Some((v, unit)) = x.unit_part() else {
            return Ok(LeadingTerm::zero(ring, level));
        };
        let needed = (level + 1 + v) as i64;
        if needed > ring.precision() as i64 {
            return Err(Error::InsufficientPrecision {
                needed,
                available: ring.precision(),
            });
        }
        Ok(LeadingTerm {
            level,
            class: Some((v as i64, unit.truncate(level + 1))),
            ring: Arc::clone(ring),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ring(&self) -> &Arc<RingDesc> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.class.is_none()
    }

    /// `vallt_n`.
    pub fn val(&self) -> Val {
        self.class.as_ref().map_or(Val::Inf, |(g, _)| Val::Fin(*g))
    }

    /// Canonical unit representative, coordinates in `[0, p^{m+1})`.
    pub fn unit(&self) -> Option<&WittNum> {
        self.class.as_ref().map(|(_, u)| u)
    }

    fn same_sort(&self, other: &LeadingTerm) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::MixedRing);
        }
        if self.level != other.level {
            return Err(Error::InvalidParameters(format!(
                "leading terms of levels {} and {}",
                self.level, other.level
            )));
        }
        Ok(())
    }

    /// Product in `lt*_n`, with `0_n` absorbing.
    pub fn mul(&self, other: &LeadingTerm) -> Result<LeadingTerm> {
        self.same_sort(other)?;
        let class = match (&self.class, &other.class) {
            (Some((g, u)), Some((h, w))) => Some((g + h, (u * w).truncate(self.level + 1))),
            _ => None,
        };
        Ok(LeadingTerm { class, ..self.clone() })
    }

    /// Group inverse in `lt*_n`.
    pub fn inv(&self) -> Result<LeadingTerm> {
        let (g, u) = self.class.as_ref().ok_or(Error::DivisionByZero)?;
        Ok(LeadingTerm {
            class: Some((-g, u.inv()?.truncate(self.level + 1))),
            ..self.clone()
        })
    }

    /// `Div_n(x, y)`: `vallt(x) ≤ vallt(y)`.
    pub fn divides(&self, other: &LeadingTerm) -> Result<bool> {
        self.same_sort(other)?;
        Ok(self.val() <= other.val())
    }

    /// `ltf_{m,n}`: reduce the unit class to `target_level + 1` digits.
    pub fn project(&self, target_level: u32) -> Result<LeadingTerm> {
        if target_level > self.level {
            return Err(Error::InvalidParameters(format!(
                "cannot project level {} to level {target_level}",
                self.level
            )));
        }
        Ok(LeadingTerm {
            level: target_level,
            class: self
                .class
                .as_ref()
                .map(|(g, u)| (*g, u.truncate(target_level + 1))),
            ring: Arc::clone(&self.ring),
        })
    }

    /// `+_{m,n}`: the class of `a + b` at `target_level` when
    /// `val(a + b) ≤ min(val a, val b) + (level - target_level)`, and `0`
    /// otherwise. Computed on the canonical representatives `u · p^γ`.
    pub fn partial_add(&self, other: &LeadingTerm, target_level: u32) -> Result<LeadingTerm> {
        self.same_sort(other)?;
        if target_level > self.level {
            return Err(Error::InvalidParameters(format!(
                "partial addition from level {} to level {target_level}",
                self.level
            )));
        }
        let slack = (self.level - target_level) as i64;
        let (g, u, h, w) = match (&self.class, &other.class) {
            (None, None) => return Ok(LeadingTerm::zero(&self.ring, target_level)),
            (Some(_), None) => return self.project(target_level),
            (None, Some(_)) => return other.project(target_level),
            (Some((g, u)), Some((h, w))) => (*g, u, *h, w),
        };
        let base = g.min(h);
        // a + b = p^base · (u p^{g-base} + w p^{h-base}); only the first
        // level+1 digits of the bracket are meaningful
        let shifted = |x: &WittNum, d: i64| -> WittNum {
            if d as u64 >= self.ring.precision() as u64 {
                self.ring.zero()
            } else {
                x.shift_up(d as u32)
            }
        };
        let sum = (&shifted(u, g - base) + &shifted(w, h - base)).truncate(self.level + 1);
        match sum.val() {
            Val::Fin(v) if v <= slack => {
                let unit = sum.shift_down(v as u32).truncate(target_level + 1);
                Ok(LeadingTerm {
                    level: target_level,
                    class: Some((base + v, unit)),
                    ring: Arc::clone(&self.ring),
                })
            }
            _ => Ok(LeadingTerm::zero(&self.ring, target_level)),
        }
    }

    /// `σ_n`, acting on the unit class.
    pub fn frobenius(&self, iterate: i64) -> LeadingTerm {
        LeadingTerm {
            class: self
                .class
                .as_ref()
                .map(|(g, u)| (*g, u.frobenius(iterate).truncate(self.level + 1))),
            ..self.clone()
        }
    }
}

impl fmt::Display for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.class {
            None => write!(f, "0[{}]", self.level),
            Some((g, u)) => write!(f, "lt[{}]({g}; {})", self.level, short_form(u, self.level)),
        }
    }
}

impl fmt::Debug for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn short_form(u: &WittNum, level: u32) -> String {
    if u.ring().k() == 1 {
        u.to_string()
    } else {
        u.digit_string(level as usize + 1)
    }
}

/// An element of `res_{p^m} = O / p^{m+1} O`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueRingElem {
    level: u32,
    value: WittNum,
}

impl ResidueRingElem {
    /// `resf_n(x)`.
    pub fn of(x: &WittNum, level: u32) -> Result<ResidueRingElem> {
        check_level(x.ring(), level)?;
        Ok(ResidueRingElem {
            level,
            value: x.truncate(level + 1),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Representative with coordinates in `[0, p^{m+1})`.
    pub fn value(&self) -> &WittNum {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, other: &ResidueRingElem) -> Result<ResidueRingElem> {
        if self.level != other.level {
            return Err(Error::InvalidParameters("residue rings of different levels".into()));
        }
        Ok(ResidueRingElem {
            level: self.level,
            value: self.value.checked_mul(&other.value)?.truncate(self.level + 1),
        })
    }

    /// `σ_n` on `res_n`.
    pub fn frobenius(&self, iterate: i64) -> ResidueRingElem {
        ResidueRingElem {
            level: self.level,
            value: self.value.frobenius(iterate).truncate(self.level + 1),
        }
    }
}

impl fmt::Display for ResidueRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "res[{}]({})", self.level, short_form(&self.value, self.level))
    }
}

impl fmt::Debug for ResidueRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `ac_n(x) = resf_n(x / p^{val(x)})`, with `ac_n(0) = 0`.
pub fn angular_component(x: &WittNum, level: u32) -> Result<ResidueRingElem> {
    match LeadingTerm::of(x, level)?.class {
        None => ResidueRingElem::of(&x.ring().zero(), level),
        Some((_, u)) => Ok(ResidueRingElem { level, value: u }),
    }
}

impl RingDesc {
    /// Parses `lt[m](γ; u)` or `0[m]`.
    pub fn parse_leading_term(self: &Arc<Self>, s: &str) -> Result<LeadingTerm> {
        let t = s.trim();
        let bad = || Error::Parse(s.to_string());
        if let Some(rest) = t.strip_prefix("0[") {
            let level: u32 = rest.strip_suffix(']').and_then(|l| l.parse().ok()).ok_or_else(bad)?;
            check_level(self, level)?;
            return Ok(LeadingTerm::zero(self, level));
        }
        let rest = t.strip_prefix("lt[").ok_or_else(bad)?;
        let (level, rest) = rest.split_once("](").ok_or_else(bad)?;
        let level: u32 = level.trim().parse().map_err(|_| bad())?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let (gamma, unit) = body.split_once(';').ok_or_else(bad)?;
        let gamma: i64 = gamma.trim().parse().map_err(|_| bad())?;
        let unit = self.parse_elem(unit)?;
        LeadingTerm::from_parts(gamma, &unit, level)
    }

    /// Parses `res[m](v)`.
    pub fn parse_residue(self: &Arc<Self>, s: &str) -> Result<ResidueRingElem> {
        let bad = || Error::Parse(s.to_string());
        let rest = s.trim().strip_prefix("res[").ok_or_else(bad)?;
        let (level, rest) = rest.split_once("](").ok_or_else(bad)?;
        let level: u32 = level.trim().parse().map_err(|_| bad())?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        ResidueRingElem::of(&self.parse_elem(body)?, level)
    }
}
