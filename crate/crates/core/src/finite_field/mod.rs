//! The residue field `F_{p^k}` in a polynomial basis over `F_p`.
//!
//! Elements are coefficient vectors of length `k` with respect to
//! `1, a, ..., a^{k-1}`, where `a` is the class of `x` modulo the defining
//! polynomial. The residue Frobenius `x ↦ x^p` is precomputed as a `k × k`
//! matrix at construction.

pub(crate) mod fp_poly;
mod linearized;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use linearized::{solve_linearized, LinearizedSolutions};
pub use roots::FieldEmbedding;

/// Upper bound on `p` so that products of two residues fit in `u64`.
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDesc {
    p: u64,
    k: usize,
    /// Monic, length `k + 1`, low-to-high.
    modulus: Vec<u64>,
    /// Column `j` holds the coordinates of `(a^j)^p`.
    frob: Vec<Vec<u64>>,
}

impl FieldDesc {
    /// Builds `F_{p^k}`, with the default modulus when `modulus` is `None`.
    ///
    /// A caller-supplied modulus is given low-to-high and may omit the
    /// leading `1`; it is checked for irreducibility.
    pub fn new(p: u64, k: usize, modulus: Option<&[u64]>) -> Result<Arc<FieldDesc>> {
        if !fp_poly::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= MAX_PRIME {
            return Err(Error::InvalidParameters(format!(
                "p = {p} exceeds the supported bound {MAX_PRIME}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameters("extension degree must be ≥ 1".into()));
        }
        let modulus = match modulus {
            None => default_modulus(p, k),
            Some(m) => {
                let mut m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m.len() == k {
                    m.push(1);
                }
                if m.len() != k + 1 || m[k] != 1 {
                    return Err(Error::InvalidParameters(format!(
                        "modulus must be monic of degree {k}"
                    )));
                }
                if !fp_poly::is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                m
            }
        };
        let frob = (0..k)
            .map(|j| {
                let mut basis = vec![0u64; j + 1];
                basis[j] = 1;
                let mut img = fp_poly::pow_rem(&basis, p, &modulus, p);
                img.resize(k, 0);
                img
            })
            .collect();
        Ok(Arc::new(FieldDesc { p, k, modulus, frob }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Monic defining polynomial, low-to-high, length `k + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^k`, or `None` when it does not fit in `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.k as u32)
    }

    pub fn zero(self: &Arc<Self>) -> FieldElem {
        FieldElem {
            desc: Arc::clone(self),
            coeffs: vec![0; self.k],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElem {
        self.from_int(1)
    }

    /// The class `a` of `x`.
    pub fn generator(self: &Arc<Self>) -> FieldElem {
        self.from_coeffs(&[0, 1])
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FieldElem {
        let c = n.rem_euclid(self.p as i64) as u64;
        self.from_coeffs(&[c])
    }

    /// Reduces an arbitrary coefficient list (low-to-high) modulo `p` and the
    /// defining polynomial.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u64]) -> FieldElem {
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % self.p).collect();
        fp_poly::trim(&mut c);
        let mut c = fp_poly::rem(&c, &self.modulus, self.p);
        c.resize(self.k, 0);
        FieldElem {
            desc: Arc::clone(self),
            coeffs: c,
        }
    }

    /// Every element, in increasing order. Intended for small fields.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElem> + '_ {
        let total = self.order().expect("field too large to enumerate");
        (0..total).map(move |mut n| {
            let mut c = vec![0u64; self.k];
            for slot in c.iter_mut() {
                *slot = (n % self.p as u128) as u64;
                n /= self.p as u128;
            }
            FieldElem {
                desc: Arc::clone(self),
                coeffs: c,
            }
        })
    }

    pub fn parse_elem(self: &Arc<Self>, s: &str) -> Result<FieldElem> {
        parse_field_poly(s, self.p).map(|c| self.from_coeffs(&c))
    }

    fn apply_frob(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.k];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0 {
                continue;
            }
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = (*slot + fp_poly::mul_mod(vj, self.frob[j][i], p)) % p;
            }
        }
        out
    }
}

/// Lexicographically least monic irreducible of degree `k`, where the
/// candidates are ordered by the integer `Σ c_i p^i` of their lower
/// coefficients.
pub fn default_modulus(p: u64, k: usize) -> Vec<u64> {
    let mut digits = vec![0u64; k];
    loop {
        let mut cand = digits.clone();
        cand.push(1);
        if fp_poly::is_irreducible(&cand, p) {
            return cand;
        }
        // increment the base-p counter, least significant digit first
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < k, "no irreducible polynomial of degree {k} over F_{p}");
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; ", self.p, self.k)?;
        for (i, c) in self.modulus.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for FieldDesc {
    type Err = Error;

    /// Parses `GF(p^k; c_0,...,c_k)`.
    fn from_str(s: &str) -> Result<FieldDesc> {
        let bad = || Error::Parse(s.to_string());
        let body = s
            .trim()
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (pk, coeffs) = body.split_once(';').ok_or_else(bad)?;
        let (p, k) = pk.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let coeffs: Vec<u64> = coeffs
            .split(',')
            .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let desc = FieldDesc::new(p, k, Some(&coeffs))?;
        Ok(Arc::try_unwrap(desc).unwrap_or_else(|a| (*a).clone()))
    }
}

/// An element of `F_{p^k}`.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    desc: Arc<FieldDesc>,
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn desc(&self) -> &Arc<FieldDesc> {
        &self.desc
    }

    /// Coordinates in the basis `1, a, ..., a^{k-1}`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if Arc::ptr_eq(&self.desc, &other.desc) || self.desc == other.desc {
            Ok(())
        } else {
            Err(Error::MixedField)
        }
    }

    pub fn checked_add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        let p = self.desc.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(FieldElem {
            desc: Arc::clone(&self.desc),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        let p = self.desc.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        Ok(FieldElem {
            desc: Arc::clone(&self.desc),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        let p = self.desc.p;
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        fp_poly::trim(&mut a);
        fp_poly::trim(&mut b);
        let mut c = fp_poly::mul_rem(&a, &b, &self.desc.modulus, p);
        c.resize(self.desc.k, 0);
        Ok(FieldElem {
            desc: Arc::clone(&self.desc),
            coeffs: c,
        })
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in
    /// `F_p[x]`.
    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.desc.p;
        let mut r0 = self.desc.modulus.clone();
        let mut r1 = self.coeffs.clone();
        fp_poly::trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = fp_poly::div_rem(&r0, &r1, p);
            let s = fp_poly::sub(&s0, &fp_poly::mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant since the modulus is irreducible
        let c = fp_poly::inv_mod(r0[0], p);
        let scaled: Vec<u64> = s0.iter().map(|&x| fp_poly::mul_mod(x, c, p)).collect();
        Ok(self.desc.from_coeffs(&scaled))
    }

    pub fn checked_div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// Square-and-multiply; the exponent is taken literally (so `pow(0) = 1`).
    pub fn pow(&self, mut exp: u128) -> FieldElem {
        let mut acc = self.desc.one();
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

    /// `x^{p^iterate}`.
    pub fn frobenius(&self, iterate: u64) -> FieldElem {
        let mut coeffs = self.coeffs.clone();
        for _ in 0..iterate % self.desc.k as u64 {
            coeffs = self.desc.apply_frob(&coeffs);
        }
        FieldElem {
            desc: Arc::clone(&self.desc),
            coeffs,
        }
    }

    /// Integer whose base-`p` digits are the coordinates, used for ordering.
    pub fn index(&self) -> u128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.desc.p as u128 + c as u128)
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by coordinates, highest degree first.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.iter().rev().cmp(other.coeffs.iter().rev())
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;

            fn $method(self, rhs: &'a FieldElem) -> FieldElem {
                self.$checked(rhs).expect("operands from different fields")
            }
        }

        impl $trait for FieldElem {
            type Output = FieldElem;

            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
    };
}

field_binop!(Add, add, checked_add);
field_binop!(Sub, sub, checked_sub);
field_binop!(Mul, mul, checked_mul);

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        &self.desc.zero() - self
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_field_poly(f, &self.coeffs)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Writes `Σ c_i a^i` highest degree first, e.g. `a^2+2*a+1`.
pub(crate) fn write_field_poly(f: &mut impl fmt::Write, coeffs: &[u64]) -> fmt::Result {
    let mut first = true;
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !first {
            f.write_char('+')?;
        }
        first = false;
        match (i, c) {
            (0, c) => write!(f, "{c}")?,
            (_, 1) => {}
            (_, c) => write!(f, "{c}*")?,
        }
        match i {
            0 => {}
            1 => f.write_char('a')?,
            i => write!(f, "a^{i}")?,
        }
    }
    if first {
        f.write_char('0')?;
    }
    Ok(())
}

/// Parses a polynomial in `a` with nonnegative integer coefficients, e.g.
/// `a^2 + 2*a + 1` or `3a`. Coefficients are reduced mod `modulus`.
pub(crate) fn parse_field_poly(s: &str, modulus: u64) -> Result<Vec<u64>> {
    let bad = || Error::Parse(s.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut coeffs: Vec<u64> = Vec::new();
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(bad());
        }
        let (coef, exp) = match term.find('a') {
            None => (term, 0usize),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|r| r.parse::<usize>().ok())
                        .ok_or_else(bad)?
                };
                (if c.is_empty() { "1" } else { c }, e)
            }
        };
        let c: u128 = coef.parse().map_err(|_| bad())?;
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] = ((coeffs[exp] as u128 + c) % modulus as u128) as u64;
    }
    Ok(coeffs)
}
