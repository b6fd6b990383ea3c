//! Quick invariant checks behind `sigmahensel selftest`.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigma_hensel::finite_field::{solve_linearized, FieldDesc};
use sigma_hensel::hensel::{sigma_hensel_solve, SolveOptions};
use sigma_hensel::series::{weierstrass_divide, SeparatedSeries, Var};
use sigma_hensel::term::Term;
use sigma_hensel::witt::RingDesc;
use sigma_hensel::Result;

use crate::parse::parse_term;

fn frobenius_laws() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (p, k) in [(2, 2), (3, 3), (7, 2)] {
        let r = RingDesc::with_params(p, k, 4)?;
        for _ in 0..100 {
            let (x, y) = (r.random(&mut rng), r.random(&mut rng));
            let hom = (&x * &y).frobenius(1) == &x.frobenius(1) * &y.frobenius(1)
                && (&x + &y).frobenius(1) == &x.frobenius(1) + &y.frobenius(1);
            let lifts = x.frobenius(1).residue() == x.residue().pow(p as u128);
            let period = x.frobenius(k as i64) == x && x.frobenius(1).val() == x.val();
            if !(hom && lifts && period) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn linearized_brute_force() -> Result<bool> {
    let f = FieldDesc::new(3, 2, None)?;
    let elems: Vec<_> = f.elements().collect();
    for c0 in elems.iter().step_by(2) {
        for c1 in elems.iter().step_by(3) {
            let b = f.generator();
            let coeffs = [c0.clone(), c1.clone()];
            let expected: Vec<_> = elems
                .iter()
                .filter(|x| &(c0 * *x) + &(c1 * &x.frobenius(1)) == b)
                .cloned()
                .collect();
            match solve_linearized(&coeffs, &b) {
                Ok(sols) => {
                    if sols.roots() != expected {
                        return Ok(false);
                    }
                }
                Err(_) => {
                    if !(c0.is_zero() && c1.is_zero()) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn division_identity() -> Result<bool> {
    let r = RingDesc::with_params(5, 1, 4)?;
    let one = r.one();
    let p = r.from_u64(5);
    let f = SeparatedSeries::from_terms(&r, 1, 1, 4, [(vec![2], vec![0], &one), (vec![1], vec![1], &one), (vec![3], vec![0], &p)])?;
    let g = SeparatedSeries::from_terms(&r, 1, 1, 4, [(vec![5], vec![2], &one), (vec![4], vec![0], &one)])?;
    let div = weierstrass_divide(&g, &f, Var::X(0))?;
    let back = div.quotient.checked_mul(&f)?.checked_add(&div.remainder)?;
    Ok(back == g && div.remainder.terms().all(|(m, _)| m.x[0] < 2))
}

fn hensel_fixture() -> Result<bool> {
    let r = RingDesc::with_params(7, 1, 4)?;
    let t = parse_term("x*x - 2", &HashMap::new())?;
    let report = sigma_hensel_solve(&t, &r.from_u64(3), None, None, &SolveOptions::default())?;
    Ok(report.root == r.from_u64(2166) && report.steps.len() == 3)
}

fn print_parse_round_trip() -> Result<bool> {
    let samples = ["s(x)*x - 7", "Q(x, s^2(x))", "x - (p + x*(x + 1))", "s^3(Q(p, x + 1))*(x - 2)"];
    for s in samples {
        let t: Term = parse_term(s, &HashMap::new())?;
        if t.to_string() != s || parse_term(&t.to_string(), &HashMap::new())? != t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs every suite; returns overall success and one line per suite.
pub fn run() -> (bool, Vec<String>) {
    let suites: [(&str, fn() -> Result<bool>); 5] = [
        ("frobenius-laws", frobenius_laws),
        ("linearized-brute-force", linearized_brute_force),
        ("weierstrass-division", division_identity),
        ("hensel-fixture", hensel_fixture),
        ("term-round-trip", print_parse_round_trip),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, suite) in suites {
        let line = match suite() {
            Ok(true) => format!("PASS {name}"),
            Ok(false) => format!("FAIL {name}"),
            Err(e) => format!("FAIL {name}: {e}"),
        };
        ok &= line.starts_with("PASS");
        lines.push(line);
    }
    (ok, lines)
}
