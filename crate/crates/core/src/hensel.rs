//! Successive approximation of roots of difference-analytic terms.
//!
//! A configuration `(t, a, d, ξ)` requires that `d` linearly approximates
//! `t` at prolongations on the open ball `val(x - a) > ξ`, and that
//! `val(t(σ̄a)) > min_i (val(d_i) + σ_Γ^i(ξ))`. Each step moves `a` by
//! `p^e · x` where `x` solves a linearized equation over the residue field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, Val};
use crate::finite_field::solve_linearized;
use crate::term::{prolongation, Term};
use crate::witt::WittNum;

/// Action of `σ` on the value group, `(γ, i) ↦ σ_Γ^i(γ)`.
pub type ValueGroupAction = fn(i64, u32) -> i64;

/// `σ` is an isometry on `W(F_{p^k})`.
pub fn isometric(gamma: i64, _iterate: u32) -> i64 {
    gamma
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Sampled pairs for the linear-approximation clause.
    pub samples: usize,
    pub seed: u64,
    pub sigma_gamma: ValueGroupAction,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            samples: 64,
            seed: 0,
            sigma_gamma: isometric,
        }
    }
}

/// How the linear-approximation clause was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximation {
    /// Polynomial term with `d` its gradient and `ξ` at least the gradient
    /// radius: holds on the whole ball.
    Certified,
    /// No violation among this many sampled pairs.
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselConfig {
    pub t: Term,
    pub a: WittNum,
    pub d: Vec<WittNum>,
    pub xi: i64,
    pub approximation: Approximation,
}

/// `(val(d_i) for finite ones)`, erroring when `d ≡ 0`.
fn min_val(d: &[WittNum]) -> Result<i64> {
    d.iter()
        .filter_map(|x| x.val().finite())
        .min()
        .ok_or(Error::ZeroGradient)
}

/// Checks the configuration. `d` defaults to the gradient at `a` and `ξ`
/// to `min_i val(d_i)`.
pub fn check_config(
    t: &Term,
    a: &WittNum,
    xi: Option<i64>,
    d: Option<Vec<WittNum>>,
    opts: &CheckOptions,
) -> Result<HenselConfig> {
    let ring = a.ring();
    let gradient = t.gradient(a)?;
    let d = match d {
        Some(d) => {
            let n = t.sigma_order() as usize + 1;
            if d.len() != n {
                return Err(Error::Arity(format!("d needs {n} entries, got {}", d.len())));
            }
            if d.iter().any(|x| x.ring() != ring) {
                return Err(Error::MixedRing);
            }
            d
        }
        None => gradient.clone(),
    };
    let gamma = min_val(&d)?;
    let xi = xi.unwrap_or(gamma);
    if xi < -1 {
        return Err(Error::InvalidParameters("ξ must be ≥ -1".into()));
    }
    let value = t.prolong_eval(a)?;
    let bound = d
        .iter()
        .enumerate()
        .filter_map(|(i, x)| Some(x.val().finite()? + (opts.sigma_gamma)(xi, i as u32)))
        .min()
        .expect("d is nonzero");
    if value.val() <= Val::Fin(bound) {
        return Err(Error::ConfigRejected(format!(
            "val(t(a)) = {} is not above min_i(val(d_i) + ξ) = {bound} at a = {}",
            value.val(),
            a
        )));
    }
    if let Some((c, e, lhs, rhs)) = sample_violation(t, a, &d, xi, opts)? {
        return Err(Error::ConfigRejected(format!(
            "d does not approximate t at prolongations: pair ({e}, {c}) gives remainder valuation {lhs} ≤ {rhs}"
        )));
    }
    let certified = t.is_polynomial() && d == gradient && xi >= gamma;
    Ok(HenselConfig {
        t: t.clone(),
        a: a.clone(),
        d,
        xi,
        approximation: if certified {
            Approximation::Certified
        } else {
            Approximation::Sampled(opts.samples)
        },
    })
}

type Violation = (WittNum, WittNum, Val, i64);

/// Looks for `c, e` in the ball with
/// `val(t(σ̄c) - t(σ̄e) - d·σ̄(c - e)) ≤ min_i(val(d_i) + val(c - e))`.
fn sample_violation(t: &Term, a: &WittNum, d: &[WittNum], xi: i64, opts: &CheckOptions) -> Result<Option<Violation>> {
    let ring = a.ring();
    let n = ring.precision() as i64;
    let radius = (xi + 1).max(0);
    if radius >= n {
        return Ok(None);
    }
    let step = ring.p_pow(radius as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let c = a + &(&ring.random(&mut rng) * &step);
        let e = if rng.gen_bool(0.5) { a.clone() } else { a + &(&ring.random(&mut rng) * &step) };
        let delta = &c - &e;
        let Some(dv) = delta.val().finite() else {
            continue;
        };
        let rhs = d.iter().filter_map(|x| x.val().finite()).min().expect("d is nonzero") + dv;
        if rhs >= n - 1 {
            // strict inequality not decidable at this precision
            continue;
        }
        let tc = match t.prolong_eval(&c) {
            Ok(v) => v,
            Err(Error::PrecisionLoss) => continue,
            Err(err) => return Err(err),
        };
        let te = match t.prolong_eval(&e) {
            Ok(v) => v,
            Err(Error::PrecisionLoss) => continue,
            Err(err) => return Err(err),
        };
        let lin = d
            .iter()
            .zip(prolongation(&delta, d.len() as u32 - 1))
            .fold(ring.zero(), |acc, (di, si)| &acc + &(di * &si));
        let lhs = (&(&tc - &te) - &lin).val();
        if lhs <= Val::Fin(rhs) {
            return Ok(Some((c, e, lhs, rhs)));
        }
    }
    Ok(None)
}

/// One step: the next approximation and the step size `e`, or `None` when
/// `t(σ̄a)` already vanishes.
pub fn hensel_step(cfg: &HenselConfig) -> Result<Option<(WittNum, i64)>> {
    step_from(&cfg.t, &cfg.a, &cfg.d)
}

fn step_from(t: &Term, a: &WittNum, d: &[WittNum]) -> Result<Option<(WittNum, i64)>> {
    let ring = a.ring();
    let value = t.prolong_eval(a)?;
    let Some((v, unit_t)) = value.unit_part() else {
        return Ok(None);
    };
    let gamma = min_val(d)?;
    let e = v as i64 - gamma;
    let unit_t_inv = unit_t.inv()?;
    // coefficient res(d_i p^e / t(σ̄a)) on x^{p^i}, nonzero exactly on argmin val(d_i)
    let coeffs: Vec<_> = d
        .iter()
        .map(|di| match di.unit_part() {
            Some((vd, ud)) if vd as i64 == gamma => (&ud * &unit_t_inv).residue(),
            _ => ring.field().zero(),
        })
        .collect();
    let rhs = -ring.field().one();
    let solutions = solve_linearized(&coeffs, &rhs)?;
    let Some(x) = solutions.least() else {
        return Err(Error::ResidueUnsolvable {
            p: ring.p(),
            k: ring.k(),
            extension_required: solutions.extension_required(),
        });
    };
    let c = a + &(&ring.lift(&x) * &ring.p_pow(e as u32));
    let next = t.prolong_eval(&c)?;
    if next.val() <= value.val() {
        return Err(Error::StalledProgress(format!(
            "val(t) did not increase from {v} at step {a} -> {c}"
        )));
    }
    if (&c - a).val() != Val::Fin(e) {
        return Err(Error::StalledProgress(format!("step {a} -> {c} has valuation other than {e}")));
    }
    Ok(Some((c, e)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub approx: WittNum,
    pub residual_val: Val,
    pub size: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub root: WittNum,
    pub steps: Vec<Step>,
    pub residual_val: Val,
    pub config: HenselConfig,
}

impl SolveReport {
    /// Size of the first step, i.e. `max_i(val(t(σ̄a_0)) - val(d_i))`.
    pub fn first_step(&self) -> Option<i64> {
        self.steps.first().map(|s| s.size)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub check: CheckOptions,
    /// Recompute `d` as the gradient at each new approximation.
    pub newton: bool,
}

/// Iterates [`hensel_step`] from `a0` until `t(σ̄a) ≡ 0 mod p^N`.
pub fn sigma_hensel_solve(t: &Term, a0: &WittNum, xi: Option<i64>, d: Option<Vec<WittNum>>, opts: &SolveOptions) -> Result<SolveReport> {
    let config = check_config(t, a0, xi, d, &opts.check)?;
    let ring = a0.ring();
    let mut a = a0.clone();
    let mut d = config.d.clone();
    let mut steps = Vec::new();
    for _ in 0..ring.precision() {
        let residual_val = t.prolong_eval(&a)?.val();
        match step_from(t, &a, &d)? {
            None => {
                return Ok(SolveReport {
                    root: a,
                    steps,
                    residual_val,
                    config,
                })
            }
            Some((c, size)) => {
                if let Some(prev) = steps.last().map(|s: &Step| s.residual_val) {
                    debug_assert!(residual_val > prev);
                }
                steps.push(Step {
                    approx: a,
                    residual_val,
                    size,
                });
                a = c;
                if opts.newton {
                    d = t.gradient(&a)?;
                }
            }
        }
    }
    let residual_val = t.prolong_eval(&a)?.val();
    if residual_val.is_inf() {
        return Ok(SolveReport {
            root: a,
            steps,
            residual_val,
            config,
        });
    }
    Err(Error::StalledProgress(format!(
        "no root after {} steps",
        ring.precision()
    )))
}
