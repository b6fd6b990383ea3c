//! Difference-analytic terms in one variable `x`.
//!
//! A term may apply `σ^i` to any subterm. Pushing `σ` inward (it commutes
//! with the ring operations, with `Q`, and acts on series through their
//! coefficients) gives a `σ`-free form `u` with `t(x) = u(x, σx, ..., σ^n x)`;
//! evaluation and differentiation work on that form.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Val};
use crate::series::{SeparatedSeries, Var};
use crate::witt::{RingDesc, WittNum};

/// A series together with the name terms refer to it by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSeries {
    pub name: String,
    pub series: SeparatedSeries,
}

impl NamedSeries {
    pub fn new(name: impl Into<String>, series: SeparatedSeries) -> Arc<NamedSeries> {
        Arc::new(NamedSeries {
            name: name.into(),
            series,
        })
    }

    /// Number of arguments: the `X` variables first, then the `Y` variables.
    pub fn arity(&self) -> usize {
        self.series.mx() + self.series.ny()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Int(u64),
    /// The uniformizer `p`.
    P,
    Const(WittNum),
    Var,
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// `Q(a, b) = a / b`, and `0` when `b = 0`.
    Quot(Box<Term>, Box<Term>),
    Sigma(u32, Box<Term>),
    Apply(Arc<NamedSeries>, Vec<Term>),
}

impl Term {
    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn quot(a: Term, b: Term) -> Term {
        Term::Quot(Box::new(a), Box::new(b))
    }

    pub fn sigma(i: u32, t: Term) -> Term {
        Term::Sigma(i, Box::new(t))
    }

    /// Applies a series, checking the number of arguments.
    pub fn apply(f: &Arc<NamedSeries>, args: Vec<Term>) -> Result<Term> {
        if args.len() != f.arity() {
            return Err(Error::Arity(format!(
                "{} takes {} arguments, got {}",
                f.name,
                f.arity(),
                args.len()
            )));
        }
        Ok(Term::Apply(Arc::clone(f), args))
    }

    fn children(&self) -> Vec<&Term> {
        match self {
            Term::Int(_) | Term::P | Term::Const(_) | Term::Var => Vec::new(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Quot(a, b) => vec![a, b],
            Term::Sigma(_, a) => vec![a],
            Term::Apply(_, args) => args.iter().collect(),
        }
    }

    /// Largest `n` such that `σ^n(x)` occurs in the `σ`-free form.
    pub fn sigma_order(&self) -> u32 {
        match self {
            Term::Sigma(i, a) => i + a.sigma_order(),
            _ => self.children().into_iter().map(Term::sigma_order).max().unwrap_or(0),
        }
    }

    pub fn contains_quot(&self) -> bool {
        matches!(self, Term::Quot(..)) || self.children().into_iter().any(Term::contains_quot)
    }

    pub fn contains_series(&self) -> bool {
        matches!(self, Term::Apply(..)) || self.children().into_iter().any(Term::contains_series)
    }

    /// Built from ring operations and `σ` only.
    pub fn is_polynomial(&self) -> bool {
        !self.contains_quot() && !self.contains_series()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Term::depth).max().unwrap_or(0)
    }

    /// The `σ`-free form `u` with `t(x) = u(x, σx, ..., σ^n x)`.
    pub fn normal_form(&self, ring: &Arc<RingDesc>) -> Result<Normal> {
        Normal::build(self, ring, 0)
    }

    /// `t(x)` computed by pushing `σ` inward and evaluating the `σ`-free
    /// form at the prolongation of `x`.
    pub fn prolong_eval(&self, x: &WittNum) -> Result<WittNum> {
        let u = self.normal_form(x.ring())?;
        u.eval(&prolongation(x, u.order()))
    }

    /// `t(x)` computed bottom-up, applying `σ` to values.
    pub fn eval_direct(&self, x: &WittNum) -> Result<WittNum> {
        let ring = x.ring();
        Ok(match self {
            Term::Int(n) => ring.from_u64(*n),
            Term::P => ring.from_u64(ring.p()),
            Term::Const(c) => {
                check_ring(c, ring)?;
                c.clone()
            }
            Term::Var => x.clone(),
            Term::Add(a, b) => a.eval_direct(x)?.checked_add(&b.eval_direct(x)?)?,
            Term::Sub(a, b) => a.eval_direct(x)?.checked_sub(&b.eval_direct(x)?)?,
            Term::Mul(a, b) => a.eval_direct(x)?.checked_mul(&b.eval_direct(x)?)?,
            Term::Quot(a, b) => a.eval_direct(x)?.quot(&b.eval_direct(x)?)?,
            Term::Sigma(i, a) => a.eval_direct(x)?.frobenius(*i as i64),
            Term::Apply(f, args) => {
                let vals = args.iter().map(|a| a.eval_direct(x)).collect::<Result<Vec<_>>>()?;
                apply_series(&f.series, &vals)?
            }
        })
    }

    /// `(∂u/∂x_0, ..., ∂u/∂x_n)` at the prolongation of `a`.
    pub fn gradient(&self, a: &WittNum) -> Result<Vec<WittNum>> {
        let u = self.normal_form(a.ring())?;
        Ok(u.eval_dual(&prolongation(a, u.order()))?.d)
    }
}

fn check_ring(c: &WittNum, ring: &Arc<RingDesc>) -> Result<()> {
    if c.ring() == ring {
        Ok(())
    } else {
        Err(Error::MixedRing)
    }
}

fn apply_series(f: &SeparatedSeries, vals: &[WittNum]) -> Result<WittNum> {
    let (xs, ys) = vals.split_at(f.mx());
    f.eval(xs, ys)
}

/// `(x, σx, ..., σ^n x)`.
pub fn prolongation(x: &WittNum, n: u32) -> Vec<WittNum> {
    let mut out = vec![x.clone()];
    for i in 1..=n as usize {
        let next = out[i - 1].frobenius(1);
        out.push(next);
    }
    out
}

/// `σ`-free form: `Slot(i)` stands for `σ^i(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normal {
    Const(WittNum),
    Slot(u32),
    Add(Box<Normal>, Box<Normal>),
    Sub(Box<Normal>, Box<Normal>),
    Mul(Box<Normal>, Box<Normal>),
    Quot(Box<Normal>, Box<Normal>),
    Apply(SeparatedSeries, Vec<Normal>),
}

/// A value together with its partial derivatives in the slots.
struct Dual {
    v: WittNum,
    d: Vec<WittNum>,
}

impl Normal {
    fn build(t: &Term, ring: &Arc<RingDesc>, shift: u32) -> Result<Normal> {
        let bin = |a: &Term, b: &Term| -> Result<(Box<Normal>, Box<Normal>)> {
            Ok((Box::new(Normal::build(a, ring, shift)?), Box::new(Normal::build(b, ring, shift)?)))
        };
        Ok(match t {
            Term::Int(n) => Normal::Const(ring.from_u64(*n)),
            Term::P => Normal::Const(ring.from_u64(ring.p())),
            Term::Const(c) => {
                check_ring(c, ring)?;
                Normal::Const(c.frobenius(shift as i64))
            }
            Term::Var => Normal::Slot(shift),
            Term::Add(a, b) => {
                let (a, b) = bin(a, b)?;
                Normal::Add(a, b)
            }
            Term::Sub(a, b) => {
                let (a, b) = bin(a, b)?;
                Normal::Sub(a, b)
            }
            Term::Mul(a, b) => {
                let (a, b) = bin(a, b)?;
                Normal::Mul(a, b)
            }
            Term::Quot(a, b) => {
                let (a, b) = bin(a, b)?;
                Normal::Quot(a, b)
            }
            Term::Sigma(i, a) => Normal::build(a, ring, shift + i)?,
            Term::Apply(f, args) => {
                if f.series.ring() != ring {
                    return Err(Error::MixedRing);
                }
                // σ(f(y)) = f^σ(σ(y))
                let args = args.iter().map(|a| Normal::build(a, ring, shift)).collect::<Result<_>>()?;
                Normal::Apply(f.series.frobenius(shift as i64), args)
            }
        })
    }

    fn children(&self) -> Vec<&Normal> {
        match self {
            Normal::Const(_) | Normal::Slot(_) => Vec::new(),
            Normal::Add(a, b) | Normal::Sub(a, b) | Normal::Mul(a, b) | Normal::Quot(a, b) => vec![a, b],
            Normal::Apply(_, args) => args.iter().collect(),
        }
    }

    /// Highest slot index used.
    pub fn order(&self) -> u32 {
        match self {
            Normal::Slot(i) => *i,
            _ => self.children().into_iter().map(Normal::order).max().unwrap_or(0),
        }
    }

    /// Evaluates at `slots = (x_0, ..., x_n)`.
    pub fn eval(&self, slots: &[WittNum]) -> Result<WittNum> {
        Ok(match self {
            Normal::Const(c) => c.clone(),
            Normal::Slot(i) => slots[*i as usize].clone(),
            Normal::Add(a, b) => a.eval(slots)?.checked_add(&b.eval(slots)?)?,
            Normal::Sub(a, b) => a.eval(slots)?.checked_sub(&b.eval(slots)?)?,
            Normal::Mul(a, b) => a.eval(slots)?.checked_mul(&b.eval(slots)?)?,
            Normal::Quot(a, b) => a.eval(slots)?.quot(&b.eval(slots)?)?,
            Normal::Apply(f, args) => {
                let vals = args.iter().map(|a| a.eval(slots)).collect::<Result<Vec<_>>>()?;
                apply_series(f, &vals)?
            }
        })
    }

    /// Forward-mode differentiation in the slots.
    fn eval_dual(&self, slots: &[WittNum]) -> Result<Dual> {
        let ring = slots[0].ring();
        let zeros = || vec![ring.zero(); slots.len()];
        Ok(match self {
            Normal::Const(c) => Dual {
                v: c.clone(),
                d: zeros(),
            },
            Normal::Slot(i) => {
                let mut d = zeros();
                d[*i as usize] = ring.one();
                Dual {
                    v: slots[*i as usize].clone(),
                    d,
                }
            }
            Normal::Add(a, b) | Normal::Sub(a, b) => {
                let (a, b) = (a.eval_dual(slots)?, b.eval_dual(slots)?);
                let sign = if matches!(self, Normal::Add(..)) { ring.one() } else { -&ring.one() };
                Dual {
                    v: &a.v + &(&sign * &b.v),
                    d: a.d.iter().zip(&b.d).map(|(x, y)| x + &(&sign * y)).collect(),
                }
            }
            Normal::Mul(a, b) => {
                let (a, b) = (a.eval_dual(slots)?, b.eval_dual(slots)?);
                Dual {
                    v: &a.v * &b.v,
                    d: a.d.iter().zip(&b.d).map(|(x, y)| &(x * &b.v) + &(&a.v * y)).collect(),
                }
            }
            Normal::Quot(a, b) => {
                let (a, b) = (a.eval_dual(slots)?, b.eval_dual(slots)?);
                if b.v.is_zero() {
                    return Err(Error::QuotientSingularity);
                }
                let q = a.v.quot(&b.v)?;
                // (a/b)' = (a' - q b') / b
                let d = a
                    .d
                    .iter()
                    .zip(&b.d)
                    .map(|(x, y)| (x - &(&q * y)).quot(&b.v))
                    .collect::<Result<_>>()?;
                Dual { v: q, d }
            }
            Normal::Apply(f, args) => {
                let args = args.iter().map(|a| a.eval_dual(slots)).collect::<Result<Vec<_>>>()?;
                let vals: Vec<WittNum> = args.iter().map(|a| a.v.clone()).collect();
                let outside = vals[f.mx()..].iter().any(|y| y.val() < Val::Fin(1));
                if outside {
                    // the zero convention holds on an open neighbourhood
                    return Ok(Dual {
                        v: ring.zero(),
                        d: zeros(),
                    });
                }
                let v = apply_series(f, &vals)?;
                let mut d = zeros();
                for (k, arg) in args.iter().enumerate() {
                    if arg.d.iter().all(WittNum::is_zero) {
                        continue;
                    }
                    let var = if k < f.mx() { Var::X(k) } else { Var::Y(k - f.mx()) };
                    let partial = apply_series(&f.derivative(var), &vals)?;
                    for (acc, x) in d.iter_mut().zip(&arg.d) {
                        *acc = &*acc + &(&partial * x);
                    }
                }
                Dual { v, d }
            }
        })
    }
}

impl Term {
    fn precedence(&self) -> u8 {
        match self {
            Term::Add(..) | Term::Sub(..) => 0,
            Term::Mul(..) => 1,
            _ => 2,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::P => write!(f, "p"),
            Term::Const(c) => {
                if c.ring().k() == 1 {
                    write!(f, "{}", c.to_int_string())
                } else {
                    write!(f, "[{}]", c.to_int_string())
                }
            }
            Term::Var => write!(f, "x"),
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " {} ", if matches!(self, Term::Add(..)) { '+' } else { '-' })?;
                b.write_at(f, 1)
            }
            Term::Mul(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "*")?;
                b.write_at(f, 2)
            }
            Term::Quot(a, b) => write!(f, "Q({a}, {b})"),
            Term::Sigma(1, a) => write!(f, "s({a})"),
            Term::Sigma(i, a) => write!(f, "s^{i}({a})"),
            Term::Apply(g, args) => {
                write!(f, "{}(", g.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
