//! Linearized equations `Σ_i c_i x^{p^i} = b` over `F_{p^k}`.
//!
//! The left-hand side is `F_p`-linear in `x`, so the solution set is an
//! affine `F_p`-subspace and is computed from a `k × k` linear system over
//! `Z/p`.

use std::sync::Arc;

use super::fp_poly::{inv_mod, mul_mod};
use super::{FieldDesc, FieldElem};
use crate::error::{Error, Result};

/// The affine solution space of a linearized equation.
#[derive(Debug, Clone)]
pub struct LinearizedSolutions {
    desc: Arc<FieldDesc>,
    particular: Option<Vec<u64>>,
    /// Reduced echelon form with respect to the most significant coordinate.
    kernel: Vec<Vec<u64>>,
}

impl LinearizedSolutions {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    /// Set when no root lies in `F_{p^k}`. A nonconstant additive polynomial
    /// always has roots in the algebraic closure, so an empty set always
    /// means that some finite extension contains a root.
    pub fn extension_required(&self) -> bool {
        self.is_empty()
    }

    /// Dimension of the kernel over `F_p`.
    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Number of roots: `0` or `p^{kernel_dim}`.
    pub fn count(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.desc.p as u128).pow(self.kernel.len() as u32)
        }
    }

    /// The least root in the order of [`FieldElem`] (coordinates compared
    /// from the highest degree down).
    pub fn least(&self) -> Option<FieldElem> {
        let p = self.desc.p;
        let mut x = self.particular.clone()?;
        for v in &self.kernel {
            let lead = leading_index(v).expect("kernel vectors are nonzero");
            // v[lead] == 1 in reduced form
            let c = x[lead];
            if c != 0 {
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi = (*xi + p - mul_mod(c, *vi, p)) % p;
                }
            }
        }
        Some(self.desc.from_coeffs(&x))
    }

    /// Every root, in increasing order. Enumerates `p^{kernel_dim}` elements.
    pub fn roots(&self) -> Vec<FieldElem> {
        let p = self.desc.p;
        let Some(base) = &self.particular else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(self.count() as usize);
        let dim = self.kernel.len();
        let mut digits = vec![0u64; dim];
        loop {
            let mut x = base.clone();
            for (d, v) in digits.iter().zip(&self.kernel) {
                if *d != 0 {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi = (*xi + mul_mod(*d, *vi, p)) % p;
                    }
                }
            }
            out.push(self.desc.from_coeffs(&x));
            let mut i = 0;
            loop {
                if i == dim {
                    out.sort();
                    return out;
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

fn leading_index(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

/// Solves `Σ_i coeffs[i] · x^{p^i} = rhs` in `F_{p^k}`.
pub fn solve_linearized(coeffs: &[FieldElem], rhs: &FieldElem) -> Result<LinearizedSolutions> {
    let desc = Arc::clone(rhs.desc());
    for c in coeffs {
        c.same_field(rhs)?;
    }
    if coeffs.iter().all(FieldElem::is_zero) {
        return Err(Error::AllCoefficientsZero);
    }
    let p = desc.p;
    let k = desc.k;
    // columns[j] = L(a^j)
    let columns: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            let mut basis = vec![0u64; k];
            basis[j] = 1;
            let mut power = desc.from_coeffs(&basis);
            let mut acc = desc.zero();
            for c in coeffs {
                acc = &acc + &(c * &power);
                power = power.frobenius(1);
            }
            acc.coeffs
        })
        .collect();
    // augmented row-major matrix [M | b]
    let mut rows: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            let mut row: Vec<u64> = columns.iter().map(|col| col[i]).collect();
            row.push(rhs.coeffs[i]);
            row
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(piv) = (r..k).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = inv_mod(rows[r][col], p);
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..k {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = (*x + p - mul_mod(f, *y, p)) % p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let consistent = rows[r..].iter().all(|row| row[k] == 0);
    let particular = consistent.then(|| {
        let mut x = vec![0u64; k];
        for (i, &col) in pivots.iter().enumerate() {
            x[col] = rows[i][k];
        }
        x
    });
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    let kernel: Vec<Vec<u64>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u64; k];
            v[fc] = 1;
            for (i, &col) in pivots.iter().enumerate() {
                v[col] = (p - rows[i][fc]) % p;
            }
            v
        })
        .collect();
    Ok(LinearizedSolutions {
        desc,
        particular,
        kernel: reduce_by_leading(kernel, p),
    })
}

/// Reduced echelon form where each vector's pivot is its most significant
/// nonzero coordinate, normalised to 1, and no other vector has a nonzero
/// entry there. Sorted by decreasing pivot.
fn reduce_by_leading(mut vs: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    while !vs.is_empty() {
        // vector with the highest leading coordinate
        let (idx, lead) = vs
            .iter()
            .enumerate()
            .filter_map(|(i, v)| leading_index(v).map(|l| (i, l)))
            .max_by_key(|&(_, l)| l)
            .expect("kernel basis is linearly independent");
        let mut v = vs.swap_remove(idx);
        let inv = inv_mod(v[lead], p);
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for w in vs.iter_mut().chain(out.iter_mut()) {
            let f = w[lead];
            if f != 0 {
                for (x, y) in w.iter_mut().zip(&v) {
                    *x = (*x + p - mul_mod(f, *y, p)) % p;
                }
            }
        }
        vs.retain(|w| leading_index(w).is_some());
        out.push(v);
    }
    out
}
