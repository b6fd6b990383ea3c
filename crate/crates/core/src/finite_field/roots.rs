//! Explicit base change `F_{p^k} → F_{p^{kj}}`.
//!
//! The embedding sends the generator to a root of the source modulus in the
//! target field, found by equal-degree splitting (Cantor–Zassenhaus) of a
//! polynomial that splits into distinct linear factors.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FieldDesc, FieldElem};
use crate::error::{Error, Result};

/// A field embedding `source → target` determined by the image of `a`.
#[derive(Debug, Clone)]
pub struct FieldEmbedding {
    source: Arc<FieldDesc>,
    target: Arc<FieldDesc>,
    image: FieldElem,
}

impl FieldEmbedding {
    pub fn source(&self) -> &Arc<FieldDesc> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldDesc> {
        &self.target
    }

    /// Image of the source generator.
    pub fn generator_image(&self) -> &FieldElem {
        &self.image
    }

    pub fn map(&self, x: &FieldElem) -> Result<FieldElem> {
        if x.desc() != &self.source {
            return Err(Error::MixedField);
        }
        // Horner in the image of the generator
        let mut acc = self.target.zero();
        for &c in x.coeffs().iter().rev() {
            acc = &(&acc * &self.image) + &self.target.from_int(c as i64);
        }
        Ok(acc)
    }
}

impl FieldDesc {
    /// Embeds this field into `F_{p^{k·factor}}` built with the default
    /// modulus. Elements of the old field are not converted implicitly; use
    /// [`FieldEmbedding::map`].
    pub fn extend(self: &Arc<Self>, factor: usize) -> Result<FieldEmbedding> {
        if factor == 0 {
            return Err(Error::InvalidParameters("extension factor must be ≥ 1".into()));
        }
        let target = FieldDesc::new(self.p, self.k * factor, None)?;
        let poly: Vec<FieldElem> = self
            .modulus
            .iter()
            .map(|&c| target.from_int(c as i64))
            .collect();
        let image = find_root(&target, poly);
        Ok(FieldEmbedding {
            source: Arc::clone(self),
            target,
            image,
        })
    }
}

// Polynomials over F_q: Vec<FieldElem>, low-to-high, trimmed.

fn trim(v: &mut Vec<FieldElem>) {
    while v.last().is_some_and(FieldElem::is_zero) {
        v.pop();
    }
}

fn poly_mul(a: &[FieldElem], b: &[FieldElem], f: &Arc<FieldDesc>) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

fn poly_rem(a: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = m[dm].inv().expect("nonzero leading coefficient");
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r.last().unwrap() * &lead_inv;
        for (j, mj) in m.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &(&c * mj);
        }
        trim(&mut r);
    }
    r
}

fn poly_mul_rem(a: &[FieldElem], b: &[FieldElem], m: &[FieldElem], f: &Arc<FieldDesc>) -> Vec<FieldElem> {
    poly_rem(&poly_mul(a, b, f), m)
}

fn poly_pow_rem(base: &[FieldElem], mut exp: u64, m: &[FieldElem], f: &Arc<FieldDesc>) -> Vec<FieldElem> {
    let mut acc = poly_rem(&[f.one()], m);
    let mut b = poly_rem(base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mul_rem(&acc, &b, m, f);
        }
        b = poly_mul_rem(&b, &b, m, f);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = std::mem::replace(&mut y, r);
    }
    if let Some(lead) = x.last().cloned() {
        let inv = lead.inv().expect("nonzero");
        for c in x.iter_mut() {
            *c = &*c * &inv;
        }
    }
    x
}

fn poly_add(a: &[FieldElem], b: &[FieldElem], f: &Arc<FieldDesc>) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out: Vec<FieldElem> = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => f.zero(),
        })
        .collect();
    trim(&mut out);
    out
}

/// A root of `g`, which must split into distinct linear factors over `f`.
fn find_root(f: &Arc<FieldDesc>, mut g: Vec<FieldElem>) -> FieldElem {
    trim(&mut g);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let p = f.p();
    loop {
        if g.len() == 2 {
            // g = g0 + g1 x
            return -(&g[0] * &g[1].inv().expect("degree one"));
        }
        let coeffs: Vec<u64> = (0..f.k()).map(|_| rng.gen_range(0..p)).collect();
        let delta = f.from_coeffs(&coeffs);
        let h = if p == 2 {
            // trace of delta·x: Σ_{i<K} (delta x)^{2^i}
            let lin = vec![f.zero(), delta];
            let mut term = poly_rem(&lin, &g);
            let mut tr = term.clone();
            for _ in 1..f.k() {
                term = poly_mul_rem(&term, &term, &g, f);
                tr = poly_add(&tr, &term, f);
            }
            tr
        } else {
            // (x + delta)^{(q-1)/2} - 1 with (q-1)/2 = Σ_{i<K} (p-1)/2 · p^i
            let mut power = poly_rem(&[delta, f.one()], &g);
            let mut acc = poly_rem(&[f.one()], &g);
            for _ in 0..f.k() {
                acc = poly_mul_rem(&acc, &poly_pow_rem(&power, (p - 1) / 2, &g, f), &g, f);
                power = poly_pow_rem(&power, p, &g, f);
            }
            poly_add(&acc, &[-f.one()], f)
        };
        let d = poly_gcd(&h, &g);
        if d.len() > 1 && d.len() < g.len() {
            // keep the smaller factor
            let other = {
                let mut q = Vec::new();
                let mut r = g.clone();
                let dd = d.len() - 1;
                q.resize(r.len() - dd, f.zero());
                while r.len() > dd {
                    let shift = r.len() - 1 - dd;
                    let c = r.last().unwrap().clone();
                    q[shift] = c.clone();
                    for (j, dj) in d.iter().enumerate() {
                        r[shift + j] = &r[shift + j] - &(&c * dj);
                    }
                    trim(&mut r);
                }
                trim(&mut q);
                q
            };
            g = if d.len() <= other.len() { d } else { other };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_homomorphism() {
        for (p, k, j) in [(2u64, 2usize, 3usize), (3, 2, 2), (5, 1, 3), (2, 3, 2), (7, 2, 2)] {
            let f = FieldDesc::new(p, k, None).unwrap();
            let emb = f.extend(j).unwrap();
            assert_eq!(emb.target().k(), k * j);
            // the generator image is a root of the source modulus
            let mut acc = emb.target().zero();
            for &c in f.modulus().iter().rev() {
                acc = &(&acc * emb.generator_image()) + &emb.target().from_int(c as i64);
            }
            assert!(acc.is_zero());
            for x in f.elements() {
                for y in f.elements() {
                    let lhs = emb.map(&(&x * &y)).unwrap();
                    let rhs = &emb.map(&x).unwrap() * &emb.map(&y).unwrap();
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(emb.map(&x.frobenius(1)).unwrap(), emb.map(&x).unwrap().frobenius(1));
            }
        }
    }

    #[test]
    fn extension_to_f_2_16() {
        let f = FieldDesc::new(2, 2, None).unwrap();
        let emb = f.extend(8).unwrap();
        let a = emb.map(&f.generator()).unwrap();
        assert_eq!(&(&a * &a) + &a, emb.target().one());
    }
}
