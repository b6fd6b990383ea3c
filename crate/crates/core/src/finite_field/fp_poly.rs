//! Dense polynomials over `Z/p`, coefficient vectors stored low-to-high.
//!
//! The zero polynomial is the empty vector; every other vector has a nonzero
//! last entry.

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse in `Z/p`; `a` must be nonzero mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a nonzero `m`.
pub(crate) fn div_rem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = inv_mod(m[dm], p);
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - dm];
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        q[shift] = c;
        for (j, &mj) in m.iter().enumerate() {
            let t = mul_mod(c, mj, p);
            r[shift + j] = (r[shift + j] + p - t) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    div_rem(a, m, p).1
}

pub(crate) fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn pow_rem(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_rem(&acc, &b, m, p);
        }
        b = mul_rem(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&mut x, p);
    x
}

pub(crate) fn make_monic(a: &mut [u64], p: u64) {
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, p);
        for c in a.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
}

/// Rabin's test: `m` monic of degree `k` is irreducible iff `x^{p^k} = x`
/// mod `m` and `gcd(x^{p^{k/q}} - x, m) = 1` for every prime `q | k`.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = match degree(m) {
        Some(0) | None => return false,
        Some(k) => k,
    };
    if k == 1 {
        return true;
    }
    let x = vec![0, 1];
    // frob_powers[i] = x^{p^i} mod m
    let mut frob_powers = vec![rem(&x, m, p)];
    for i in 1..=k {
        let next = pow_rem(&frob_powers[i - 1], p, m, p);
        frob_powers.push(next);
    }
    if sub(&frob_powers[k], &x, p) != rem(&[], m, p) {
        return false;
    }
    prime_factors(k as u64).into_iter().all(|q| {
        let h = sub(&frob_powers[k / q as usize], &x, p);
        gcd(&h, m, p) == vec![1]
    })
}
