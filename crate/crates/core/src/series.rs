//! Truncated separated power series `A⟨X⟩[[Y]]` over `A = W(F_{p^k})` with
//! coefficient ideal `I = pA`.
//!
//! A series is stored as a sparse map from exponent pairs `(μ, ν)` to
//! coefficients mod `p^N`. Monomials of total `Y`-degree at least
//! `y_bound` are dropped, so the working ring is
//! `(A/p^N)[X][Y] / (Y^ν : |ν| ≥ y_bound)`. In that ring `p` and the `Y`
//! variables are nilpotent, which is what makes Weierstrass division
//! terminate after finitely many correction passes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Val};
use crate::witt::{RingDesc, WittNum};

/// Exponent pair `(μ, ν)`; ordered lexicographically by `μ`, then `ν`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

impl Monomial {
    pub fn new(x: Vec<u32>, y: Vec<u32>) -> Monomial {
        Monomial { x, y }
    }

    pub fn one(mx: usize, ny: usize) -> Monomial {
        Monomial {
            x: vec![0; mx],
            y: vec![0; ny],
        }
    }

    pub fn y_degree(&self) -> u32 {
        self.y.iter().sum()
    }

    fn exponent(&self, var: Var) -> u32 {
        match var {
            Var::X(i) => self.x[i],
            Var::Y(j) => self.y[j],
        }
    }

    fn exponent_mut(&mut self, var: Var) -> &mut u32 {
        match var {
            Var::X(i) => &mut self.x[i],
            Var::Y(j) => &mut self.y[j],
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A variable of a separated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Ranges over the valuation ring.
    X(usize),
    /// Ranges over the maximal ideal.
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "X{i}"),
            Var::Y(j) => write!(f, "Y{j}"),
        }
    }
}

/// Order in which reducible monomials are processed during Weierstrass
/// division. The result does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivisionOrder {
    #[default]
    Descending,
    Ascending,
}

/// Witness of preregularity: `f_{μ0,ν0} ≡ 1` and the clauses on the other
/// coefficients hold for degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preregularity {
    pub mu0: Vec<u32>,
    pub nu0: Vec<u32>,
    pub d: u32,
}

/// `Σ_i d^{m-1-i} μ_i` for `μ` of length `m`: the degree in the last
/// variable of the leading monomial of `T_d(X)^μ`.
pub fn weierstrass_weight(mu: &[u32], d: u64) -> u64 {
    mu.iter().fold(0u64, |acc, &e| acc * d + e as u64)
}

#[derive(Clone, PartialEq, Eq)]
pub struct SeparatedSeries {
    ring: Arc<RingDesc>,
    mx: usize,
    ny: usize,
    y_bound: u32,
    terms: BTreeMap<Monomial, WittNum>,
}

impl SeparatedSeries {
    pub fn zero(ring: &Arc<RingDesc>, mx: usize, ny: usize, y_bound: u32) -> SeparatedSeries {
        SeparatedSeries {
            ring: Arc::clone(ring),
            mx,
            ny,
            y_bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<RingDesc>, mx: usize, ny: usize, y_bound: u32, c: &WittNum) -> SeparatedSeries {
        let mut s = SeparatedSeries::zero(ring, mx, ny, y_bound);
        s.add_term(Monomial::one(mx, ny), c);
        s
    }

    /// The series consisting of the single variable `var`.
    pub fn variable(ring: &Arc<RingDesc>, mx: usize, ny: usize, y_bound: u32, var: Var) -> SeparatedSeries {
        let mut m = Monomial::one(mx, ny);
        *m.exponent_mut(var) = 1;
        let mut s = SeparatedSeries::zero(ring, mx, ny, y_bound);
        s.add_term(m, &ring.one());
        s
    }

    /// Builds a series from `(x-exponents, y-exponents, coefficient)` triples.
    pub fn from_terms<'a>(
        ring: &Arc<RingDesc>,
        mx: usize,
        ny: usize,
        y_bound: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, Vec<u32>, &'a WittNum)>,
    ) -> Result<SeparatedSeries> {
        let mut s = SeparatedSeries::zero(ring, mx, ny, y_bound);
        for (x, y, c) in terms {
            if x.len() != mx || y.len() != ny {
                return Err(Error::Arity(format!(
                    "monomial with {} X and {} Y exponents in a series with {mx} X and {ny} Y variables",
                    x.len(),
                    y.len()
                )));
            }
            if c.ring() != ring {
                return Err(Error::MixedRing);
            }
            s.add_term(Monomial::new(x, y), c);
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Arc<RingDesc> {
        &self.ring
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Total `Y`-degree below which monomials are kept.
    pub fn y_bound(&self) -> u32 {
        self.y_bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &WittNum)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> WittNum {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Adds `c · m`, respecting the truncation.
    pub fn add_term(&mut self, m: Monomial, c: &WittNum) {
        if m.y_degree() >= self.y_bound || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Same variables and ring; the result keeps the smaller truncation.
    fn compatible(&self, other: &SeparatedSeries) -> Result<u32> {
        if self.ring != other.ring {
            return Err(Error::MixedRing);
        }
        if self.mx != other.mx || self.ny != other.ny {
            return Err(Error::Arity(format!(
                "series in ({}, {}) and ({}, {}) variables",
                self.mx, self.ny, other.mx, other.ny
            )));
        }
        Ok(self.y_bound.min(other.y_bound))
    }

    /// Drops monomials of total `Y`-degree `≥ y_bound` (no-op above the
    /// current bound).
    pub fn truncated(&self, y_bound: u32) -> SeparatedSeries {
        self.with_bound(y_bound)
    }

    fn with_bound(&self, y_bound: u32) -> SeparatedSeries {
        if y_bound >= self.y_bound {
            return self.clone();
        }
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, y_bound);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn checked_add(&self, other: &SeparatedSeries) -> Result<SeparatedSeries> {
        let bound = self.compatible(other)?;
        let mut out = self.with_bound(bound);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SeparatedSeries) -> Result<SeparatedSeries> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &SeparatedSeries) -> Result<SeparatedSeries> {
        let bound = self.compatible(other)?;
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, bound);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.y_degree() + m2.y_degree() >= bound {
                    continue;
                }
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> SeparatedSeries {
        self.scale(&-&self.ring.one())
    }

    pub fn scale(&self, c: &WittNum) -> SeparatedSeries {
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &(a * c));
        }
        out
    }

    fn mul_monomial(&self, mono: &Monomial, c: &WittNum) -> SeparatedSeries {
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound);
        for (m, a) in &self.terms {
            out.add_term(m.mul(mono), &(a * c));
        }
        out
    }

    fn one_like(&self) -> SeparatedSeries {
        SeparatedSeries::constant(&self.ring, self.mx, self.ny, self.y_bound, &self.ring.one())
    }

    pub fn pow(&self, e: u32) -> SeparatedSeries {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same shape");
        }
        acc
    }

    /// Coefficientwise `σ^iterate`, i.e. `f^σ`.
    pub fn frobenius(&self, iterate: i64) -> SeparatedSeries {
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.frobenius(iterate));
        }
        out
    }

    /// Evaluates at `(x, y)`.
    ///
    /// Points with some `val(y_j) < 1` lie outside the domain and evaluate
    /// to `0`. The truncation is exact when every dropped monomial vanishes
    /// mod `p^N`, i.e. when `min_j val(y_j) · y_bound ≥ N`; otherwise the
    /// evaluation is refused.
    pub fn eval(&self, x: &[WittNum], y: &[WittNum]) -> Result<WittNum> {
        if x.len() != self.mx || y.len() != self.ny {
            return Err(Error::Arity(format!(
                "series in ({}, {}) variables applied to ({}, {}) arguments",
                self.mx,
                self.ny,
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(y).any(|a| a.ring() != &self.ring) {
            return Err(Error::MixedRing);
        }
        if y.iter().any(|b| b.val() < Val::Fin(1)) {
            return Ok(self.ring.zero());
        }
        let n = self.ring.precision();
        if let Some(Val::Fin(v)) = y.iter().map(WittNum::val).min() {
            if (v as u64) * (self.y_bound as u64) < n as u64 {
                return Err(Error::TruncationUnsound {
                    bound: self.y_bound,
                    precision: n,
                });
            }
        }
        let powers = |vals: &[WittNum], idx: usize, max: u32| -> Vec<WittNum> {
            let mut out = vec![self.ring.one()];
            for e in 1..=max {
                out.push(&out[e as usize - 1] * &vals[idx]);
            }
            out
        };
        let max_x: Vec<u32> = (0..self.mx)
            .map(|i| self.terms.keys().map(|m| m.x[i]).max().unwrap_or(0))
            .collect();
        let max_y: Vec<u32> = (0..self.ny)
            .map(|j| self.terms.keys().map(|m| m.y[j]).max().unwrap_or(0))
            .collect();
        let xp: Vec<Vec<WittNum>> = (0..self.mx).map(|i| powers(x, i, max_x[i])).collect();
        let yp: Vec<Vec<WittNum>> = (0..self.ny).map(|j| powers(y, j, max_y[j])).collect();
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.x.iter().enumerate() {
                t = &t * &xp[i][e as usize];
            }
            for (j, &e) in m.y.iter().enumerate() {
                t = &t * &yp[j][e as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Formal partial derivative. Differentiating in a `Y` variable lowers
    /// the truncation bound by one, since the dropped degree-`y_bound`
    /// monomials would contribute at degree `y_bound - 1`.
    pub fn derivative(&self, var: Var) -> SeparatedSeries {
        let bound = match var {
            Var::X(_) => self.y_bound,
            Var::Y(_) => self.y_bound.saturating_sub(1),
        };
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, bound);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            *dm.exponent_mut(var) -= 1;
            out.add_term(dm, &c.scale(e as u64));
        }
        out
    }

    /// Terms surviving reduction mod `J + (Y_S)` where `S` is the set of
    /// `Y` indices for which `keep_y` is false: the coefficient must be a
    /// unit... or rather nonzero mod `p`, and the dropped `Y` exponents zero.
    fn residual_terms(&self, keep_y: impl Fn(usize) -> bool) -> impl Iterator<Item = (&Monomial, &WittNum)> {
        self.terms.iter().filter(move |(m, c)| {
            c.val() == Val::Fin(0) && m.y.iter().enumerate().all(|(j, &e)| e == 0 || keep_y(j))
        })
    }

    /// The degree `d` for which the series is regular in `var`, if any.
    ///
    /// `X_i`: congruent to a monic polynomial of degree `d` in `X_i` modulo
    /// `J + (Y)`. `Y_j`: congruent to `Y_j^d` modulo
    /// `J + (Y_{≠j}) + (Y_j^{d+1})`.
    pub fn regular_degree(&self, var: Var) -> Option<u32> {
        match var {
            Var::X(i) => {
                let live: Vec<(&Monomial, &WittNum)> = self.residual_terms(|_| false).collect();
                let d = live.iter().map(|(m, _)| m.x[i]).max()?;
                let top: Vec<_> = live.iter().filter(|(m, _)| m.x[i] == d).collect();
                let monic = top.len() == 1 && {
                    let (m, c) = top[0];
                    m.x.iter().enumerate().all(|(l, &e)| l == i || e == 0) && c.residue().is_one()
                };
                monic.then_some(d)
            }
            Var::Y(j) => {
                let live: Vec<(&Monomial, &WittNum)> = self.residual_terms(|l| l == j).collect();
                let d = live.iter().map(|(m, _)| m.y[j]).min()?;
                let low: Vec<_> = live.iter().filter(|(m, _)| m.y[j] == d).collect();
                let pure = low.len() == 1 && {
                    let (m, c) = low[0];
                    m.x.iter().all(|&e| e == 0) && c.residue().is_one()
                };
                pure.then_some(d)
            }
        }
    }

    /// Preregularity in the inner variables `(X_inner, Y_inner)`; the
    /// remaining variables are the outer block.
    ///
    /// Returns the witness for the smallest admissible `d`. For that `d` the
    /// witness is forced: `ν0` is the lexicographically least inner
    /// `Y`-exponent of a coefficient outside `J + (Y_outer)` and `μ0` the
    /// largest inner `X`-exponent paired with it.
    pub fn preregular(&self, inner_x: &[usize], inner_y: &[usize]) -> Option<Preregularity> {
        let outer_y: Vec<usize> = (0..self.ny).filter(|j| !inner_y.contains(j)).collect();
        let outer_x: Vec<usize> = (0..self.mx).filter(|i| !inner_x.contains(i)).collect();
        // coefficient f_{μ,ν}(X2, Y2) reduced mod J + (Y2)
        let mut reduced: BTreeMap<(Vec<u32>, Vec<u32>), Vec<(&Monomial, &WittNum)>> = BTreeMap::new();
        for (m, c) in self.residual_terms(|j| inner_y.contains(&j)) {
            let mu: Vec<u32> = inner_x.iter().map(|&i| m.x[i]).collect();
            let nu: Vec<u32> = inner_y.iter().map(|&j| m.y[j]).collect();
            reduced.entry((mu, nu)).or_default().push((m, c));
        }
        debug_assert!(reduced.values().all(|v| v
            .iter()
            .all(|(m, _)| outer_y.iter().all(|&j| m.y[j] == 0))));
        let d = reduced
            .keys()
            .map(|(mu, nu)| mu.iter().sum::<u32>() + nu.iter().sum::<u32>())
            .max()?
            + 1;
        let nu0 = reduced.keys().map(|(_, nu)| nu.clone()).min()?;
        let mu0 = reduced
            .keys()
            .filter(|(_, nu)| *nu == nu0)
            .map(|(mu, _)| mu.clone())
            .max()?;
        let witness = &reduced[&(mu0.clone(), nu0.clone())];
        let is_one = witness.len() == 1 && {
            let (m, c) = witness[0];
            outer_x.iter().all(|&i| m.x[i] == 0) && c.residue().is_one()
        };
        is_one.then_some(Preregularity { mu0, nu0, d })
    }

    /// Substitutes each variable by a series (same shape as the result).
    fn substitute(&self, images: &[(Var, SeparatedSeries)]) -> SeparatedSeries {
        let mut out = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound);
        let mut cache: BTreeMap<(usize, u32), SeparatedSeries> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut keep = m.clone();
            let mut acc = self.one_like();
            for (idx, (var, img)) in images.iter().enumerate() {
                let e = m.exponent(*var);
                *keep.exponent_mut(*var) = 0;
                if e == 0 {
                    continue;
                }
                let power = cache.entry((idx, e)).or_insert_with(|| img.pow(e)).clone();
                acc = acc.checked_mul(&power).expect("same shape");
            }
            out = out
                .checked_add(&acc.mul_monomial(&keep, c))
                .expect("same shape");
        }
        out
    }

    /// The Weierstrass change of variables `T_d` on the block `vars` (all of
    /// one kind, in order): `V_i ↦ V_i + V_last^{d^{l-1-i}}`, the last
    /// variable fixed. With `inverse` set the signs are flipped.
    pub fn weierstrass_change(&self, d: u32, vars: &[Var], inverse: bool) -> Result<SeparatedSeries> {
        if d == 0 {
            return Err(Error::InvalidParameters("T_d needs d ≥ 1".into()));
        }
        for &v in vars {
            self.check_var(v)?;
        }
        let Some(&last) = vars.last() else {
            return Ok(self.clone());
        };
        let same_kind = vars.iter().all(|v| matches!((v, last), (Var::X(_), Var::X(_)) | (Var::Y(_), Var::Y(_))));
        if !same_kind {
            return Err(Error::InvalidParameters("T_d acts on a block of X or of Y variables".into()));
        }
        let l = vars.len();
        let sign = if inverse { -&self.ring.one() } else { self.ring.one() };
        let images: Vec<(Var, SeparatedSeries)> = vars[..l - 1]
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let e = (d as u64).checked_pow((l - 1 - i) as u32).expect("exponent overflow") as u32;
                let mut mono = Monomial::one(self.mx, self.ny);
                *mono.exponent_mut(last) = e;
                let shift = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound)
                    .plus_term(mono, &sign);
                let img = SeparatedSeries::variable(&self.ring, self.mx, self.ny, self.y_bound, v)
                    .checked_add(&shift)
                    .expect("same shape");
                (v, img)
            })
            .collect();
        Ok(self.substitute(&images))
    }

    fn plus_term(mut self, m: Monomial, c: &WittNum) -> SeparatedSeries {
        self.add_term(m, c);
        self
    }

    /// Terms of `self` with `var`-exponent below `d`, and the rest.
    fn split_at_degree(&self, var: Var, d: u32) -> (SeparatedSeries, SeparatedSeries) {
        let mut low = SeparatedSeries::zero(&self.ring, self.mx, self.ny, self.y_bound);
        let mut high = low.clone();
        for (m, c) in &self.terms {
            if m.exponent(var) < d {
                low.add_term(m.clone(), c);
            } else {
                high.add_term(m.clone(), c);
            }
        }
        (low, high)
    }

    /// Inverse of a series congruent to a unit constant modulo `J + (Y)`.
    pub fn unit_inverse(&self) -> Result<SeparatedSeries> {
        let c0 = self.coefficient(&Monomial::one(self.mx, self.ny));
        let not_unit = || Error::InvalidParameters("series is not a unit".into());
        if !c0.is_unit() {
            return Err(not_unit());
        }
        let c0_inv = c0.inv()?;
        // self = c0 (1 + n) with n ∈ (p, Y), hence nilpotent
        let n = self.scale(&c0_inv).checked_sub(&self.one_like())?;
        if n.residual_terms(|_| false).next().is_some() {
            return Err(not_unit());
        }
        let neg_n = n.neg();
        let mut acc = self.one_like();
        let mut power = self.one_like();
        for _ in 0..self.nilpotency_cap() {
            power = power.checked_mul(&neg_n)?;
            if power.is_zero() {
                return Ok(acc.scale(&c0_inv));
            }
            acc = acc.checked_add(&power)?;
        }
        Err(Error::StalledProgress("geometric series for a unit inverse did not terminate".into()))
    }

    fn check_var(&self, var: Var) -> Result<()> {
        let ok = match var {
            Var::X(i) => i < self.mx,
            Var::Y(j) => j < self.ny,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Arity(format!("{var} is not a variable of a series in ({}, {}) variables", self.mx, self.ny)))
        }
    }

    /// `(p, Y)^t` vanishes in the working ring for `t ≥ N + y_bound - 1`.
    fn nilpotency_cap(&self) -> u32 {
        self.ring.precision() + self.y_bound + 1
    }
}

/// Quotient and remainder of Weierstrass division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Division {
    pub quotient: SeparatedSeries,
    pub remainder: SeparatedSeries,
}

/// `f = unit · poly` with `poly` monic in the distinguished variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preparation {
    pub unit: SeparatedSeries,
    pub poly: SeparatedSeries,
}

/// Euclidean division of `g` by `f0`, which is monic of degree `d` in the
/// `X` variable `var` (its other monomials have lower `var`-degree).
fn euclid_monic(
    g: &SeparatedSeries,
    f0: &SeparatedSeries,
    var: Var,
    d: u32,
    order: DivisionOrder,
) -> (SeparatedSeries, SeparatedSeries) {
    let mut rem = g.clone();
    let mut quot = SeparatedSeries::zero(&g.ring, g.mx, g.ny, g.y_bound);
    loop {
        let next = {
            let mut reducible = rem.terms.iter().filter(|(m, _)| m.exponent(var) >= d);
            match order {
                DivisionOrder::Descending => reducible.max_by(|a, b| {
                    a.0.exponent(var).cmp(&b.0.exponent(var)).then(a.0.cmp(b.0))
                }),
                DivisionOrder::Ascending => reducible.next(),
            }
            .map(|(m, c)| (m.clone(), c.clone()))
        };
        let Some((m, c)) = next else {
            return (quot, rem);
        };
        let mut qm = m;
        *qm.exponent_mut(var) -= d;
        rem = rem
            .checked_sub(&f0.mul_monomial(&qm, &c))
            .expect("same shape");
        quot.add_term(qm, &c);
    }
}

/// Weierstrass division `g = q·f + r` with `r` a polynomial in `var` of
/// degree below the regularity degree `d` of `f`.
///
/// For a `Y` variable the result is only determined modulo total
/// `Y`-degree `y_bound - d` and is truncated there.
pub fn weierstrass_divide(g: &SeparatedSeries, f: &SeparatedSeries, var: Var) -> Result<Division> {
    weierstrass_divide_ordered(g, f, var, DivisionOrder::default())
}

pub fn weierstrass_divide_ordered(
    g: &SeparatedSeries,
    f: &SeparatedSeries,
    var: Var,
    order: DivisionOrder,
) -> Result<Division> {
    let bound = g.compatible(f)?;
    let (g, f) = (g.with_bound(bound), f.with_bound(bound));
    f.check_var(var)?;
    let d = f.regular_degree(var).ok_or_else(|| Error::NotRegular(var.to_string()))?;
    let mut quotient = SeparatedSeries::zero(&f.ring, f.mx, f.ny, bound);
    let mut remainder = quotient.clone();
    let mut pending = g;
    match var {
        Var::X(_) => {
            // f = f0 + e with f0 monic of degree d in var and e ∈ J + (Y)
            let (low, high) = f.split_at_degree(var, d);
            let mut lead = Monomial::one(f.mx, f.ny);
            *lead.exponent_mut(var) = d;
            let f0 = low.clone().plus_term(lead.clone(), &f.ring.one());
            let e = high.plus_term(lead, &-&f.ring.one());
            for _ in 0..f.nilpotency_cap() {
                if pending.is_zero() {
                    return Ok(Division { quotient, remainder });
                }
                let (q0, r0) = euclid_monic(&pending, &f0, var, d, order);
                pending = q0.checked_mul(&e)?.neg();
                quotient = quotient.checked_add(&q0)?;
                remainder = remainder.checked_add(&r0)?;
            }
        }
        Var::Y(_) => {
            // f = var^d · u + e with u a unit and e ∈ J + (Y_{≠j})
            let (e, high) = f.split_at_degree(var, d);
            let mut shift = Monomial::one(f.mx, f.ny);
            *shift.exponent_mut(var) = d;
            let unit = shift_down(&high, var, d);
            let unit_inv = unit.unit_inverse()?;
            // dividing by var^d loses d degrees of Y-information
            let known = bound.saturating_sub(d);
            for _ in 0..f.nilpotency_cap() {
                if pending.is_zero() {
                    return Ok(Division {
                        quotient: quotient.with_bound(known),
                        remainder: remainder.with_bound(known),
                    });
                }
                let (r0, hi) = pending.split_at_degree(var, d);
                let q0 = shift_down(&hi, var, d).checked_mul(&unit_inv)?;
                pending = q0.checked_mul(&e)?.neg();
                quotient = quotient.checked_add(&q0)?;
                remainder = remainder.checked_add(&r0)?;
            }
        }
    }
    Err(Error::StalledProgress("Weierstrass division did not terminate".into()))
}

/// Multiplies by `var^{-d}`; every exponent of `var` must be at least `d`.
fn shift_down(s: &SeparatedSeries, var: Var, d: u32) -> SeparatedSeries {
    let mut out = SeparatedSeries::zero(&s.ring, s.mx, s.ny, s.y_bound);
    for (m, c) in &s.terms {
        let mut m = m.clone();
        *m.exponent_mut(var) -= d;
        out.add_term(m, c);
    }
    out
}

/// Weierstrass preparation `f = u · P` with `P` monic of degree `d` in
/// `var` and `u` a unit, obtained from the division of `var^d` by `f`.
///
/// For a `Y` variable the factors are known below `Y`-degree
/// `y_bound - d`, which has to exceed `d`.
pub fn weierstrass_prepare(f: &SeparatedSeries, var: Var) -> Result<Preparation> {
    f.check_var(var)?;
    let d = f.regular_degree(var).ok_or_else(|| Error::NotRegular(var.to_string()))?;
    if matches!(var, Var::Y(_)) && f.y_bound <= 2 * d {
        // P is known below Y-degree y_bound - d, which must include var^d
        return Err(Error::InvalidParameters(format!(
            "preparation in {var} of degree {d} needs yDegBound > {}",
            2 * d
        )));
    }
    let mut lead = Monomial::one(f.mx, f.ny);
    *lead.exponent_mut(var) = d;
    let target = SeparatedSeries::zero(&f.ring, f.mx, f.ny, f.y_bound).plus_term(lead, &f.ring.one());
    let Division { quotient, remainder } = weierstrass_divide(&target, f, var)?;
    let poly = target.checked_sub(&remainder)?;
    let unit = quotient.unit_inverse()?;
    Ok(Preparation { unit, poly })
}

impl SeparatedSeries {
    /// Line-oriented text: a header `series mX nY yDegBound`, then one line
    /// per monomial `μ_0 .. μ_{mX-1} | ν_0 .. ν_{nY-1} : <coefficient>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("series {} {} {}\n", self.mx, self.ny, self.y_bound);
        for (m, c) in &self.terms {
            let xs: Vec<String> = m.x.iter().map(u32::to_string).collect();
            let ys: Vec<String> = m.y.iter().map(u32::to_string).collect();
            out.push_str(&format!("{} | {} : {}\n", xs.join(" "), ys.join(" "), c.to_int_string()));
        }
        out
    }

    /// Parses [`SeparatedSeries::to_text`] output. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(ring: &Arc<RingDesc>, text: &str) -> Result<SeparatedSeries> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |n: usize, l: &str| Error::Parse(format!("line {}: {l}", n + 1));
        let (n0, header) = lines.next().ok_or_else(|| Error::Parse("empty series file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [kw, mx, ny, yb] = fields[..] else {
            return Err(bad(n0, header));
        };
        if kw != "series" {
            return Err(bad(n0, header));
        }
        let parse_num = |s: &str| s.parse::<u32>().map_err(|_| bad(n0, header));
        let (mx, ny, yb) = (parse_num(mx)? as usize, parse_num(ny)? as usize, parse_num(yb)?);
        let mut s = SeparatedSeries::zero(ring, mx, ny, yb);
        for (n, line) in lines {
            let (exps, coeff) = line.split_once(':').ok_or_else(|| bad(n, line))?;
            let (xs, ys) = exps.split_once('|').ok_or_else(|| bad(n, line))?;
            let ints = |part: &str| -> Result<Vec<u32>> {
                part.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| bad(n, line)))
                    .collect()
            };
            let (x, y) = (ints(xs)?, ints(ys)?);
            if x.len() != mx || y.len() != ny {
                return Err(bad(n, line));
            }
            let c = ring.parse_elem(coeff)?;
            s.add_term(Monomial::new(x, y), &c);
        }
        Ok(s)
    }
}

impl fmt::Display for SeparatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c.to_int_string())?;
            for (i, &e) in m.x.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*X{i}")?,
                    e => write!(f, "*X{i}^{e}")?,
                }
            }
            for (j, &e) in m.y.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*Y{j}")?,
                    e => write!(f, "*Y{j}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SeparatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
