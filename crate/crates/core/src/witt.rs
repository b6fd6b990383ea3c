//! The unramified extension `W(F_{p^k})` of `Z_p`, truncated at absolute
//! precision `p^N`.
//!
//! Elements live in `(Z/p^N)[x]/(Φ)` where `Φ` is the integer lift of the
//! residue modulus (coefficients in `[0, p)`); any monic lift of an
//! irreducible residue polynomial presents the same ring. The Frobenius lift
//! `σ` is the substitution `x ↦ s` where `s` is the root of `Φ` congruent to
//! `x^p` mod `p`, precomputed as a `k × k` matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result, Val};
use crate::finite_field::{parse_field_poly, write_field_poly, FieldDesc, FieldElem, FieldEmbedding};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingDesc {
    field: Arc<FieldDesc>,
    precision: u32,
    /// `p^N`.
    modulus: u64,
    /// Monic integer lift of the residue modulus, length `k + 1`.
    phi: Vec<u64>,
    sigma_image: Vec<u64>,
    /// Column `j` holds the coordinates of `σ(x^j)`.
    sigma: Vec<Vec<u64>>,
}

impl RingDesc {
    /// `W(field)` mod `p^precision`. Requires `p^precision < 2^63`.
    pub fn new(field: Arc<FieldDesc>, precision: u32) -> Result<Arc<RingDesc>> {
        if precision == 0 {
            return Err(Error::InvalidParameters("precision must be ≥ 1".into()));
        }
        let p = field.p();
        let modulus = p
            .checked_pow(precision)
            .filter(|m| *m < 1 << 63)
            .ok_or_else(|| Error::InvalidParameters(format!("{p}^{precision} exceeds 2^63")))?;
        let k = field.k();
        let phi = field.modulus().to_vec();
        let identity: Vec<Vec<u64>> = (0..k)
            .map(|j| {
                let mut col = vec![0u64; k];
                col[j] = 1;
                col
            })
            .collect();
        let draft = Arc::new(RingDesc {
            field: Arc::clone(&field),
            precision,
            modulus,
            phi,
            sigma_image: Vec::new(),
            sigma: identity,
        });
        // root of Φ congruent to a^p, by Newton iteration
        let frob_gen = field.generator().frobenius(1);
        let mut s = draft.lift(&frob_gen);
        for _ in 0..=precision + 1 {
            let value = draft.eval_phi(&s, false);
            if value.is_zero() {
                break;
            }
            let slope = draft.eval_phi(&s, true);
            s = &s - &(&value * &slope.inv()?);
        }
        debug_assert!(draft.eval_phi(&s, false).is_zero());
        let mut sigma = Vec::with_capacity(k);
        let mut power = draft.one();
        for _ in 0..k {
            sigma.push(power.coeffs.clone());
            power = &power * &s;
        }
        let sigma_image = s.coeffs;
        let desc = Arc::try_unwrap(draft).unwrap_or_else(|a| (*a).clone());
        Ok(Arc::new(RingDesc {
            sigma_image,
            sigma,
            ..desc
        }))
    }

    /// Convenience constructor with the default modulus.
    pub fn with_params(p: u64, k: usize, precision: u32) -> Result<Arc<RingDesc>> {
        RingDesc::new(FieldDesc::new(p, k, None)?, precision)
    }

    /// `Φ(s)`, or `Φ'(s)` when `derivative` is set.
    fn eval_phi(self: &Arc<Self>, s: &WittNum, derivative: bool) -> WittNum {
        horner(self, &self.phi, s, derivative)
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn k(&self) -> usize {
        self.field.k()
    }

    /// Absolute precision `N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn phi(&self) -> &[u64] {
        &self.phi
    }

    /// Coordinates of `σ(x)`.
    pub fn sigma_image(&self) -> &[u64] {
        &self.sigma_image
    }

    fn elem(self: &Arc<Self>, coeffs: Vec<u64>) -> WittNum {
        WittNum {
            ring: Arc::clone(self),
            coeffs,
        }
    }

    pub fn zero(self: &Arc<Self>) -> WittNum {
        self.elem(vec![0; self.k()])
    }

    pub fn one(self: &Arc<Self>) -> WittNum {
        self.from_u64(1)
    }

    pub fn from_u64(self: &Arc<Self>, n: u64) -> WittNum {
        let mut c = vec![0; self.k()];
        c[0] = n % self.modulus;
        self.elem(c)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> WittNum {
        let m = self.modulus as i128;
        self.from_u64((n as i128).rem_euclid(m) as u64)
    }

    /// `p^e`, zero when `e ≥ N`.
    pub fn p_pow(self: &Arc<Self>, e: u32) -> WittNum {
        if e >= self.precision {
            self.zero()
        } else {
            self.from_u64(self.p().pow(e))
        }
    }

    /// Reduces a coordinate list (any length, low-to-high) modulo `p^N` and `Φ`.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u64]) -> WittNum {
        let c: Vec<u64> = coeffs.iter().map(|x| x % self.modulus).collect();
        self.elem(self.reduce(c))
    }

    /// The integer-coordinate lift of a residue (digits in `[0, p)`).
    pub fn lift(self: &Arc<Self>, r: &FieldElem) -> WittNum {
        assert_eq!(r.desc(), &self.field, "residue from a different field");
        self.elem(r.coeffs().to_vec())
    }

    /// The Teichmüller representative: the unique `ω ≡ r` mod `p` with
    /// `ω^{p^k} = ω`.
    pub fn teichmuller(self: &Arc<Self>, r: &FieldElem) -> WittNum {
        let mut w = self.lift(r);
        for _ in 0..=self.precision {
            let mut next = w.clone();
            for _ in 0..self.k() {
                next = next.pow(self.p() as u128);
            }
            if next == w {
                break;
            }
            w = next;
        }
        w
    }

    pub fn random(self: &Arc<Self>, rng: &mut impl Rng) -> WittNum {
        let c = (0..self.k()).map(|_| rng.gen_range(0..self.modulus)).collect();
        self.elem(c)
    }

    /// A uniformly random unit.
    pub fn random_unit(self: &Arc<Self>, rng: &mut impl Rng) -> WittNum {
        loop {
            let x = self.random(rng);
            if x.val() == Val::Fin(0) {
                return x;
            }
        }
    }

    fn reduce(&self, mut c: Vec<u64>) -> Vec<u64> {
        let k = self.k();
        let m = self.modulus as u128;
        // Φ is monic of degree k
        while c.len() > k {
            let top = c.pop().unwrap() as u128;
            if top == 0 {
                continue;
            }
            let shift = c.len() - k;
            for (j, &phij) in self.phi[..k].iter().enumerate() {
                let t = (top * phij as u128) % m;
                c[shift + j] = ((c[shift + j] as u128 + m - t) % m) as u64;
            }
        }
        c.resize(k, 0);
        c
    }

    fn apply_sigma(&self, v: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        let mut out = vec![0u128; self.k()];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0 {
                continue;
            }
            for (slot, &s) in out.iter_mut().zip(&self.sigma[j]) {
                *slot = (*slot + vj as u128 * s as u128) % m;
            }
        }
        out.into_iter().map(|x| x as u64).collect()
    }

    /// Parses an element literal: an integer, a polynomial in `a` with
    /// integer coefficients, a digit expansion `[d_0, ..., d_j] base p`
    /// with residue digits, or `teich(r)`.
    pub fn parse_elem(self: &Arc<Self>, s: &str) -> Result<WittNum> {
        let t = s.trim();
        let bad = || Error::Parse(s.to_string());
        if let Some(inner) = t.strip_prefix("teich(").and_then(|r| r.strip_suffix(')')) {
            let r = self.field.parse_elem(inner)?;
            return Ok(self.teichmuller(&r));
        }
        if let Some(rest) = t.strip_prefix('[') {
            let (digits, tail) = rest.split_once(']').ok_or_else(bad)?;
            let base: u64 = tail
                .trim()
                .strip_prefix("base")
                .and_then(|b| b.trim().parse().ok())
                .ok_or_else(bad)?;
            if base != self.p() {
                return Err(bad());
            }
            let mut acc = self.zero();
            let mut scale = self.one();
            let pw = self.from_u64(self.p());
            for d in digits.split(',').filter(|d| !d.trim().is_empty()) {
                let r = self.field.parse_elem(d)?;
                acc = &acc + &(&self.lift(&r) * &scale);
                scale = &scale * &pw;
            }
            return Ok(acc);
        }
        if let Some(neg) = t.strip_prefix('-') {
            return Ok(-self.parse_elem(neg)?);
        }
        let coeffs = parse_field_poly(t, self.modulus)?;
        Ok(self.from_coeffs(&coeffs))
    }

    /// Base change to `W(F_{p^{k·factor}})` at the same precision.
    pub fn extend(self: &Arc<Self>, factor: usize) -> Result<RingEmbedding> {
        let field_emb = self.field.extend(factor)?;
        let target = RingDesc::new(Arc::clone(field_emb.target()), self.precision)?;
        // root of Φ in the target lifting the residue root
        let mut s = target.lift(field_emb.generator_image());
        let phi_t = |s: &WittNum, derivative: bool| horner(&target, &self.phi, s, derivative);
        for _ in 0..=self.precision + 1 {
            let value = phi_t(&s, false);
            if value.is_zero() {
                break;
            }
            s = &s - &(&value * &phi_t(&s, true).inv()?);
        }
        Ok(RingEmbedding {
            source: Arc::clone(self),
            target,
            field: field_emb,
            image: s,
        })
    }
}

/// Evaluates the integer polynomial `coeffs` (or its derivative) at `s`.
fn horner(ring: &Arc<RingDesc>, coeffs: &[u64], s: &WittNum, derivative: bool) -> WittNum {
    let mut acc = ring.zero();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if derivative {
            if i == 0 {
                break;
            }
            acc = &(&acc * s) + &ring.from_u64(c * i as u64);
        } else {
            acc = &(&acc * s) + &ring.from_u64(c);
        }
    }
    acc
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({}) mod {}^{}", self.field, self.p(), self.precision)
    }
}

/// Ring embedding `W(F_{p^k}) → W(F_{p^{kj}})`; commutes with `σ`.
#[derive(Debug, Clone)]
pub struct RingEmbedding {
    source: Arc<RingDesc>,
    target: Arc<RingDesc>,
    field: FieldEmbedding,
    image: WittNum,
}

impl RingEmbedding {
    pub fn source(&self) -> &Arc<RingDesc> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RingDesc> {
        &self.target
    }

    pub fn field_embedding(&self) -> &FieldEmbedding {
        &self.field
    }

    pub fn map(&self, x: &WittNum) -> Result<WittNum> {
        if x.ring != self.source {
            return Err(Error::MixedRing);
        }
        let mut acc = self.target.zero();
        for &c in x.coeffs.iter().rev() {
            acc = &(&acc * &self.image) + &self.target.from_u64(c);
        }
        Ok(acc)
    }
}

/// An element of `W(F_{p^k})` mod `p^N`.
#[derive(Clone, PartialEq, Eq)]
pub struct WittNum {
    ring: Arc<RingDesc>,
    coeffs: Vec<u64>,
}

fn vp(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

impl WittNum {
    pub fn ring(&self) -> &Arc<RingDesc> {
        &self.ring
    }

    /// Coordinates in `Z/p^N`, basis `1, x, ..., x^{k-1}`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_ring(&self, other: &WittNum) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MixedRing)
        }
    }

    /// Largest `v ≤ N` with `p^v | x`; `Inf` when `x ≡ 0` mod `p^N`.
    pub fn val(&self) -> Val {
        let p = self.ring.p();
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| vp(c, p))
            .min()
            .map_or(Val::Inf, Val::Fin)
    }

    pub fn is_unit(&self) -> bool {
        self.val() == Val::Fin(0)
    }

    /// Reduction mod `p`.
    pub fn residue(&self) -> FieldElem {
        let p = self.ring.p();
        let c: Vec<u64> = self.coeffs.iter().map(|x| x % p).collect();
        self.ring.field.from_coeffs(&c)
    }

    pub fn checked_add(&self, other: &WittNum) -> Result<WittNum> {
        self.same_ring(other)?;
        let m = self.ring.modulus;
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u128 + b as u128) % m as u128) as u64)
            .collect();
        Ok(self.ring.elem(c))
    }

    pub fn checked_sub(&self, other: &WittNum) -> Result<WittNum> {
        self.same_ring(other)?;
        let m = self.ring.modulus;
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u128 + m as u128 - b as u128) % m as u128) as u64)
            .collect();
        Ok(self.ring.elem(c))
    }

    pub fn checked_mul(&self, other: &WittNum) -> Result<WittNum> {
        self.same_ring(other)?;
        let m = self.ring.modulus as u128;
        let k = self.ring.k();
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % m;
            }
        }
        let c = self.ring.reduce(prod.into_iter().map(|x| x as u64).collect());
        Ok(self.ring.elem(c))
    }

    pub fn scale(&self, n: u64) -> WittNum {
        let m = self.ring.modulus as u128;
        let n = n as u128 % m;
        let c = self.coeffs.iter().map(|&a| (a as u128 * n % m) as u64).collect();
        self.ring.elem(c)
    }

    pub fn pow(&self, mut exp: u128) -> WittNum {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit: residue inverse refined by Newton's iteration
    /// `y ↦ y(2 - xy)`.
    pub fn inv(&self) -> Result<WittNum> {
        let v = self.val();
        if v != Val::Fin(0) {
            return Err(Error::NonUnitInverse(v));
        }
        let r = self.residue().inv()?;
        let mut y = self.ring.lift(&r);
        let two = self.ring.from_u64(2);
        let mut digits = 1;
        while digits < self.ring.precision {
            y = &y * &(&two - &(self * &y));
            digits *= 2;
        }
        debug_assert!((self * &y) == self.ring.one());
        Ok(y)
    }

    /// Exact division by `p^v`; the top `v` digits of the result are zero.
    /// Requires `val(x) ≥ v`.
    pub fn shift_down(&self, v: u32) -> WittNum {
        debug_assert!(self.val() >= Val::Fin(v as i64));
        let d = self.ring.p().pow(v.min(self.ring.precision));
        self.ring.elem(self.coeffs.iter().map(|&c| c / d).collect())
    }

    /// Multiplication by `p^v`.
    pub fn shift_up(&self, v: u32) -> WittNum {
        self * &self.ring.p_pow(v)
    }

    /// `(val(x), x / p^{val(x)})`, or `None` for zero.
    pub fn unit_part(&self) -> Option<(u32, WittNum)> {
        let v = self.val().finite()? as u32;
        Some((v, self.shift_down(v)))
    }

    /// Coordinates reduced mod `p^j` (`j ≤ N`), kept in this ring.
    pub fn truncate(&self, j: u32) -> WittNum {
        if j >= self.ring.precision {
            return self.clone();
        }
        let m = self.ring.p().pow(j);
        self.ring.elem(self.coeffs.iter().map(|&c| c % m).collect())
    }

    /// `Q(x, y)`: `x / y` for `y ≠ 0`, `0` for `y = 0`.
    ///
    /// Fails with `PrecisionLoss` when `val(y) > val(x)`. Dividing by `p^v`
    /// discards the top `v` digits, which are returned as zero.
    pub fn quot(&self, y: &WittNum) -> Result<WittNum> {
        self.same_ring(y)?;
        let Some((vy, uy)) = y.unit_part() else {
            return Ok(self.ring.zero());
        };
        if self.val() < Val::Fin(vy as i64) {
            return Err(Error::PrecisionLoss);
        }
        Ok(&self.shift_down(vy) * &uy.inv()?)
    }

    /// `σ^iterate`; negative iterates use `σ^{-1} = σ^{k-1}`.
    pub fn frobenius(&self, iterate: i64) -> WittNum {
        let k = self.ring.k() as i64;
        let mut c = self.coeffs.clone();
        for _ in 0..iterate.rem_euclid(k) {
            c = self.ring.apply_sigma(&c);
        }
        self.ring.elem(c)
    }

    /// Coordinatewise base-`p` digits: entry `j` is the residue whose
    /// coordinates are the `j`-th digits of this element's coordinates.
    pub fn digits(&self) -> Vec<FieldElem> {
        let p = self.ring.p();
        (0..self.ring.precision)
            .map(|j| {
                let d = p.pow(j);
                let c: Vec<u64> = self.coeffs.iter().map(|&x| (x / d) % p).collect();
                self.ring.field.from_coeffs(&c)
            })
            .collect()
    }

    /// `[d_0, d_1, ...] base p`.
    pub fn to_digit_string(&self) -> String {
        self.digit_string(self.ring.precision as usize)
    }

    pub(crate) fn digit_string(&self, len: usize) -> String {
        let ds: Vec<String> = self.digits().iter().take(len).map(|d| d.to_string()).collect();
        format!("[{}] base {}", ds.join(", "), self.ring.p())
    }

    /// Integer for `k = 1`, otherwise a polynomial in `a` with coefficients
    /// in `[0, p^N)`.
    pub fn to_int_string(&self) -> String {
        if self.ring.k() == 1 {
            return self.coeffs[0].to_string();
        }
        let mut s = String::new();
        write_field_poly(&mut s, &self.coeffs).expect("write to string");
        s
    }
}

macro_rules! witt_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a WittNum> for &'a WittNum {
            type Output = WittNum;

            fn $method(self, rhs: &'a WittNum) -> WittNum {
                self.$checked(rhs).expect("operands from different rings")
            }
        }

        impl $trait for WittNum {
            type Output = WittNum;

            fn $method(self, rhs: WittNum) -> WittNum {
                (&self).$method(&rhs)
            }
        }
    };
}

witt_binop!(Add, add, checked_add);
witt_binop!(Sub, sub, checked_sub);
witt_binop!(Mul, mul, checked_mul);

impl Neg for &WittNum {
    type Output = WittNum;

    fn neg(self) -> WittNum {
        &self.ring.zero() - self
    }
}

impl Neg for WittNum {
    type Output = WittNum;

    fn neg(self) -> WittNum {
        -&self
    }
}

impl fmt::Display for WittNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ring.k() == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            f.write_str(&self.to_digit_string())
        }
    }
}

impl fmt::Debug for WittNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
