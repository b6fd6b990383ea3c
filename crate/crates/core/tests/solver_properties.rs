use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigma_hensel::hensel::{sigma_hensel_solve, SolveOptions};
use sigma_hensel::leading_term::LeadingTerm;
use sigma_hensel::series::{SeparatedSeries, Var};
use sigma_hensel::term::{NamedSeries, Term};
use sigma_hensel::witt::{RingDesc, WittNum};
use sigma_hensel::{Error, Val};

fn ring(choice: usize) -> Arc<RingDesc> {
    let (p, k) = [(2, 1), (2, 2), (3, 2), (7, 1), (5, 3)][choice % 5];
    RingDesc::with_params(p, k, 6).unwrap()
}

fn random_term(r: &Arc<RingDesc>, rng: &mut ChaCha8Rng, f: &Arc<NamedSeries>, depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Term::Int(rng.gen_range(0..50)),
            1 => Term::P,
            2 => Term::Const(r.random(rng)),
            _ => Term::Var,
        };
    }
    let mut sub = || random_term(r, rng, f, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..7) {
        0 => Term::add(a, b),
        1 => Term::sub(a, b),
        2 => Term::mul(a, b),
        3 => Term::quot(a, b),
        4 => Term::sigma(rng.gen_range(0..3), a),
        5 => Term::apply(f, vec![a, Term::mul(Term::P, b)]).unwrap(),
        _ => Term::sigma(1, Term::mul(a, b)),
    }
}

/// `c0·x + c1·σ(x) + p·(c2·x·σ(x) + c3·σ²(x)²) + b`, with `b` chosen so
/// that `t(a) ≡ 0 mod p`.
fn random_sigma_polynomial(r: &Arc<RingDesc>, rng: &mut ChaCha8Rng, a: &WittNum) -> Term {
    let c = |rng: &mut ChaCha8Rng| Term::Const(r.random(rng));
    let sx = || Term::sigma(1, Term::Var);
    let s2x = || Term::sigma(2, Term::Var);
    let body = Term::add(
        Term::add(Term::mul(c(rng), Term::Var), Term::mul(c(rng), sx())),
        Term::mul(
            Term::P,
            Term::add(Term::mul(c(rng), Term::mul(Term::Var, sx())), Term::mul(c(rng), Term::mul(s2x(), s2x()))),
        ),
    );
    let shift = &(&r.p_pow(1) * &r.random(rng)) - &body.prolong_eval(a).unwrap();
    Term::add(body, Term::Const(shift))
}

/// Upper bound on the number of top digits discarded by the quotients in
/// `t` at `x`; `None` when a denominator is itself undetermined.
fn lost_digits(t: &Term, x: &WittNum) -> Option<u32> {
    let n = x.ring().precision() as i64;
    match t {
        Term::Int(_) | Term::P | Term::Const(_) | Term::Var => Some(0),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => Some(lost_digits(a, x)? + lost_digits(b, x)?),
        Term::Quot(a, b) => {
            let inner = lost_digits(a, x)? + lost_digits(b, x)?;
            let v = match b.eval_direct(x).ok()?.val() {
                Val::Fin(v) if v + (inner as i64) < n => v as u32,
                Val::Inf if inner == 0 => 0,
                _ => return None,
            };
            Some(inner + v)
        }
        Term::Sigma(_, a) => lost_digits(a, x),
        Term::Apply(_, args) => args.iter().map(|a| lost_digits(a, x)).sum(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn prolongation_matches_direct_evaluation(seed in any::<u64>(), choice in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(choice);
        let one = r.one();
        let f = SeparatedSeries::from_terms(&r, 1, 1, 6, [(vec![2], vec![1], &one), (vec![0], vec![0], &one), (vec![1], vec![3], &r.from_u64(5))]).unwrap();
        let f = NamedSeries::new("f", f);
        let t = random_term(&r, &mut rng, &f, 4);
        let x = &r.p_pow(rng.gen_range(0..2)) * &r.random(&mut rng);
        let lost = lost_digits(&t, &x);
        prop_assume!(lost.is_some_and(|s| s < r.precision()));
        let (a, b) = (t.prolong_eval(&x), t.eval_direct(&x));
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((&a - &b).val() >= Val::Fin((r.precision() - lost.unwrap()) as i64), "t = {}: {:?} vs {:?}", t, a, b),
            (a, b) => prop_assert_eq!(a, b, "t = {}", t),
        }
        if !t.contains_quot() {
            prop_assert_eq!(t.prolong_eval(&x), t.eval_direct(&x), "t = {}", t);
        }
    }

    #[test]
    fn solver_is_sound_and_progresses(seed in any::<u64>(), choice in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(choice);
        let a0 = r.random(&mut rng);
        let t = random_sigma_polynomial(&r, &mut rng, &a0);
        match sigma_hensel_solve(&t, &a0, None, None, &SolveOptions::default()) {
            Ok(rep) => {
                prop_assert!(t.prolong_eval(&rep.root).unwrap().is_zero());
                prop_assert!(rep.residual_val.is_inf());
                for (s, next) in rep.steps.iter().zip(rep.steps.iter().skip(1)) {
                    prop_assert!(next.residual_val > s.residual_val);
                }
                let Some(e0) = rep.first_step() else {
                    prop_assert_eq!(&rep.root, &a0);
                    return Ok(());
                };
                prop_assert!(e0 > rep.config.xi);
                prop_assert!((&rep.root - &a0).val() >= Val::Fin(e0));
                // σ-Henselianity bound: max_i (val t(a0) − val d_i)
                let tv = t.prolong_eval(&a0).unwrap().val().finite().unwrap();
                let bound = rep.config.d.iter().filter_map(|d| d.val().finite()).map(|v| tv - v).max().unwrap();
                prop_assert!((&rep.root - &a0).val() >= Val::Fin(bound));
            }
            Err(e) => prop_assert!(
                matches!(e, Error::ResidueUnsolvable { .. } | Error::ZeroGradient | Error::ConfigRejected(_)),
                "unexpected {:?} for {}", e, t
            ),
        }
    }

    #[test]
    fn leading_term_of_a_difference_is_linear(seed in any::<u64>(), choice in 0usize..5, level in 0u32..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, k) = [(2, 1), (2, 2), (3, 2), (7, 1), (5, 3)][choice];
        let r = RingDesc::with_params(p, k, 14).unwrap();
        let coeffs: Vec<WittNum> = (0..rng.gen_range(2..5)).map(|_| r.random(&mut rng)).collect();
        let power = |j: usize| (0..j).fold(Term::Int(1), |acc, _| Term::mul(acc, Term::Var));
        let t = coeffs.iter().enumerate().fold(Term::Int(0), |acc, (j, c)| Term::add(acc, Term::mul(Term::Const(c.clone()), power(j))));
        let dt = coeffs.iter().enumerate().skip(1).fold(Term::Int(0), |acc, (j, c)| {
            Term::add(acc, Term::mul(Term::Const(c.scale(j as u64)), power(j - 1)))
        });
        let a = r.random(&mut rng);
        let slope = dt.eval_direct(&a).unwrap();
        let delta = slope.val().finite();
        prop_assume!(delta.is_some_and(|v| v <= 2));
        let v = delta.unwrap() as u32 + level + 1 + rng.gen_range(0..3);
        let e = &a + &(&r.p_pow(v) * &r.random_unit(&mut rng));
        let diff = &t.eval_direct(&a).unwrap() - &t.eval_direct(&e).unwrap();
        let lhs = LeadingTerm::of(&diff, level).unwrap();
        let rhs = LeadingTerm::of(&slope, level).unwrap().mul(&LeadingTerm::of(&(&a - &e), level).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(t.gradient(&a).unwrap(), vec![slope]);
    }

    #[test]
    fn leading_term_diagram_commutes(seed in any::<u64>(), choice in 0usize..5, shift in 0u32..3, level in 0u32..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(choice);
        let x = &r.p_pow(shift) * &r.random_unit(&mut rng);
        let lt = LeadingTerm::of(&x, level).unwrap();
        prop_assert_eq!(lt.val(), x.val());
        for lower in 0..=level {
            prop_assert_eq!(lt.project(lower).unwrap(), LeadingTerm::of(&x, lower).unwrap());
        }
        prop_assert_eq!(LeadingTerm::of(&x.frobenius(1), level).unwrap(), lt.frobenius(1));
    }
}

#[test]
fn gradient_of_a_series_matches_its_derivative() {
    let r = RingDesc::with_params(7, 1, 4).unwrap();
    let one = r.one();
    let geo = SeparatedSeries::from_terms(&r, 0, 1, 5, (0..5).map(|j| (vec![], vec![j], &one))).unwrap();
    let slope = geo.derivative(Var::Y(0)).eval(&[], &[r.from_u64(7)]).unwrap();
    let t = Term::apply(&NamedSeries::new("geo", geo), vec![Term::Var]).unwrap();
    assert_eq!(t.gradient(&r.from_u64(7)).unwrap(), vec![slope]);
}
