//! Randomized equivalence suite: block analytics against the dense
//! simulator, plus the structural invariants of each module.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blockmath::{
    block_for_type, generalized_block, propagator, survival_prob, BlockPropagator, BlockType,
    TwoLevelBlock,
};
use crate::error::Result;
use crate::fullsim::{
    build_hamiltonian, index, monte_carlo, phase_kickback, run_shot_cooling, Ancilla,
    MonteCarloConfig,
};
use crate::optimizer::{default_params, optimize_params};
use crate::protocol::{
    gap_model_probability, initial_weights, run_cooling, run_schedule, step, strategy_one,
    weights_after, CoolingParams, StrategyOneConfig,
};
use crate::thermal::{SpectrumModel, SplitAssignment, ThermalSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Register size for the dense simulator.
    pub n_states: usize,
    /// Random cases per check.
    pub cases: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_states: 16,
            cases: 100,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    /// Largest deviation seen; 0 for pass/fail checks that held.
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seconds: f64,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max_error: f64,
    violations: usize,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            max_error: 0.0,
            violations: 0,
        }
    }

    fn observe(&mut self, error: f64) {
        self.cases += 1;
        if error.is_nan() {
            self.violations += 1;
            self.max_error = f64::NAN;
        } else {
            self.max_error = self.max_error.max(error);
        }
    }

    fn require(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
        }
    }

    fn finish(self, started: Instant) -> CheckResult {
        let passed = self.violations == 0 && self.max_error <= self.tolerance;
        CheckResult {
            name: self.name,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: self.tolerance,
            passed,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn random_block(rng: &mut ChaCha8Rng) -> (TwoLevelBlock, f64) {
    let b = TwoLevelBlock::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(0.0..1.0),
    );
    (b, rng.random_range(0.0..100.0))
}

/// `(γ, δ, t)` over γ ∈ [-1, 1], δ ∈ (0, 0.5], t ∈ (0, 4π].
pub fn random_params(rng: &mut ChaCha8Rng) -> CoolingParams {
    CoolingParams::new(
        rng.random_range(-1.0..=1.0),
        0.5 - rng.random_range(0.0..0.5),
        4.0 * PI - rng.random_range(0.0..4.0 * PI),
    )
}

fn identity_dev(u: &BlockPropagator) -> f64 {
    u.mul(&u.adjoint())
        .max_abs_diff(&BlockPropagator::identity())
}

fn check_blocks(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let started = Instant::now();
    let mut unitary = Check::new("block_unitarity", 1e-12);
    let mut gg = Check::new("block_survival_equals_gg", 1e-12);
    let mut compose = Check::new("block_composition", 1e-10);
    for _ in 0..cfg.cases {
        let (b, t) = random_block(rng);
        let u = propagator(&b, t);
        unitary.observe(identity_dev(&u).max((u.determinant().norm() - 1.0).abs()));
        let s = survival_prob(&b, t);
        gg.observe(if (0.0..=1.0).contains(&s) {
            (s - u.gg().norm_sqr()).abs()
        } else {
            f64::NAN
        });
        let t2 = rng.random_range(0.0..50.0);
        compose.observe(propagator(&b, t + t2).max_abs_diff(&propagator(&b, t2).mul(&u)));
    }
    vec![
        unitary.finish(started),
        gg.finish(started),
        compose.finish(started),
    ]
}

fn check_dense_blocks(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let started = Instant::now();
    let mut check = Check::new("dense_vs_block_propagator", 1e-10);
    let n = cfg.n_states;
    for _ in 0..cfg.cases.div_ceil(10) {
        let p = random_params(rng);
        let w = rng.random_range(0..n);
        let h = build_hamiltonian(n, w, p.gamma, p.delta, &SpectrumModel::Degenerate)?;
        let u = h.propagator(p.t)?;
        let energies = SpectrumModel::Degenerate.energies(n, w)?;
        let mut err: f64 = 0.0;
        for m in 0..n {
            let left = (m + n - 1) % n;
            let bu = propagator(
                &generalized_block(energies[left], energies[m], p.gamma, p.delta),
                p.t,
            );
            let ids = [index(left, Ancilla::Excited), index(m, Ancilla::Ground)];
            for (i, &a) in ids.iter().enumerate() {
                for (j, &b) in ids.iter().enumerate() {
                    err = err.max((u[(a, b)] - bu.m[i][j]).norm());
                }
            }
        }
        check.observe(err);
    }
    Ok(check.finish(started))
}

/// Cooling and survival from the block recursion against the dense
/// simulator for one random case.
pub fn cooling_discrepancy(w: usize, spec: &ThermalSpec, stages: &[CoolingParams]) -> Result<f64> {
    let full = run_shot_cooling(spec, w, stages)?;
    let block = run_schedule(spec, stages)?;
    let mut err: f64 = 0.0;
    for (a, b) in full.trace.iter().zip(&block.trace) {
        err = err
            .max((a.cooling_probability - b.cooling_probability).abs())
            .max((a.survival_probability - b.survival_probability).abs());
    }
    Ok(err)
}

fn check_cooling(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let started = Instant::now();
    let n = cfg.n_states;
    let mut equiv = Check::new("cooling_block_vs_dense", 1e-10);
    let mut translate = Check::new("answer_translation_invariance", 1e-10);
    let mut fidelity = Check::new("dense_fidelity_equals_cooling", 1e-10);
    for case in 0..cfg.cases {
        let p = random_params(rng);
        let m = rng.random_range(0..=5usize);
        let spec = ThermalSpec::new(n as f64, rng.random_range(0.0..3.0));
        let w = rng.random_range(0..n);
        equiv.observe(cooling_discrepancy(w, &spec, &vec![p; m])?);
        if case % 10 == 0 {
            let a = run_shot_cooling(&spec, w, &vec![p; m])?;
            let b = run_shot_cooling(&spec, (w + 1 + case) % n, &vec![p; m])?;
            translate.observe(
                (a.cooling_probability - b.cooling_probability)
                    .abs()
                    .max((a.survival_probability - b.survival_probability).abs()),
            );
            fidelity.observe((a.conditional_fidelity - a.cooling_probability).abs());
        }
    }
    Ok(vec![
        equiv.finish(started),
        translate.finish(started),
        fidelity.finish(started),
    ])
}

fn check_recursion(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let started = Instant::now();
    let mut closed = Check::new("closed_form_vs_recursion", 1e-12);
    let mut monotone = Check::new("monotone_purification", 0.0);
    for _ in 0..cfg.cases {
        let spec = ThermalSpec::new(
            10f64.powf(rng.random_range(0.5..23.0)),
            rng.random_range(0.0..9.0),
        );
        let p = random_params(rng);
        let ws0 = initial_weights(&spec, &p)?;
        let m = rng.random_range(0..=50u32);
        let mut it = ws0.clone();
        let mut err: f64 = 0.0;
        let mut ok = true;
        for k in 1..=m {
            it = match step(&it) {
                Ok(next) => next,
                Err(_) => {
                    ok = false;
                    break;
                }
            };
            let cf = weights_after(&ws0, k)?;
            for (a, b) in cf.groups.iter().zip(&it.groups) {
                err = err.max((a.weight - b.weight).abs());
            }
        }
        if ok {
            closed.observe(err);
        }
        let b0 = ws0.answer_retention().unwrap_or(0.0);
        if b0 >= ws0.max_competing_retention() {
            let mut prev = ws0.answer_weight();
            let mut nondecreasing = true;
            for k in 1..=20 {
                let cur = weights_after(&ws0, k)?.answer_weight();
                nondecreasing &= cur >= prev - 1e-15;
                prev = cur;
            }
            monotone.require(nondecreasing);
        }
    }
    Ok(vec![closed.finish(started), monotone.finish(started)])
}

fn check_strategy_one(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let started = Instant::now();
    let mut certain = Check::new("strategy1_certainty", 1e-12);
    let mut below = Check::new("strategy1_success_below_p0", 0.0);
    let mut dense = Check::new("strategy1_dense_agreement", 1e-10);
    let n = cfg.n_states.clamp(3, 8);
    for case in 0..cfg.cases {
        let p0 = rng.random_range(1e-6..1.0);
        let s1 = StrategyOneConfig {
            delta1: 0.3 - rng.random_range(0.0..0.3),
            delta2: 0.3 - rng.random_range(0.0..0.3),
            j1: rng.random_range(0..3),
            j2: rng.random_range(0..3),
        };
        let spec = ThermalSpec::with_p0(n as f64, p0);
        let r = strategy_one(&spec, &s1)?;
        certain.observe((r.report.conditional_fidelity - 1.0).abs());
        below.require(r.p_success <= p0);
        if case % 4 == 0 {
            let full = run_shot_cooling(&spec, case % n, &s1.stages())?;
            dense.observe(
                (full.conditional_fidelity - 1.0)
                    .abs()
                    .max((full.survival_probability - r.p_success).abs()),
            );
        }
    }
    Ok(vec![
        certain.finish(started),
        below.finish(started),
        dense.finish(started),
    ])
}

fn check_gap_model(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let started = Instant::now();
    let mut check = Check::new("split_spectrum_block_vs_dense", 1e-10);
    let n = cfg.n_states.max(3);
    let params = default_params();
    let corners = SplitAssignment::corners();
    for _ in 0..cfg.cases.div_ceil(5) {
        let r = rng.random_range(0.0..0.5);
        let assignment = corners[rng.random_range(0..corners.len())];
        let spec = ThermalSpec::new(n as f64, rng.random_range(0.0..3.0))
            .with_spectrum(SpectrumModel::Split { r, assignment });
        let m = rng.random_range(0..=5u32);
        let block = gap_model_probability(&spec, &params, m)?;
        let full = run_shot_cooling(&spec, rng.random_range(0..n), &vec![params; m as usize])?;
        check.observe((block - full.cooling_probability).abs());
    }
    Ok(check.finish(started))
}

fn check_optimizer() -> Result<CheckResult> {
    let started = Instant::now();
    let mut check = Check::new("optimizer_answer_retention", 1e-9);
    for &(t, n) in &[
        (2.0 * PI, 1),
        (2.0 * PI, 2),
        (4.0 * PI, 2),
        (5.0, 1),
        (9.0, 3),
    ] {
        let r = optimize_params(t, n)?;
        let b0 = survival_prob(&block_for_type(BlockType::Answer, r.gamma, r.delta), t);
        let b2 = survival_prob(&block_for_type(BlockType::Generic, r.gamma, r.delta), t);
        check.observe((1.0 - b0).abs().max((b2 - (1.0 - r.objective)).abs()));
    }
    Ok(check.finish(started))
}

/// A random normalized oracle state.
pub fn random_oracle_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= norm);
    psi
}

fn check_kickback(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let started = Instant::now();
    let mut check = Check::new("phase_kickback", 1e-12);
    for case in 0..cfg.cases {
        let n = if case % 2 == 0 { 4 } else { 8 };
        let psi = random_oracle_state(rng, n);
        let w = rng.random_range(0..n);
        let out = phase_kickback(&psi, w)?;
        let mut err = (out.p_g - psi[w].norm_sqr()).abs();
        if let Some(post) = out.post_g {
            err = err.max((post[w].norm_sqr() - 1.0).abs());
        }
        check.observe(err);
    }
    Ok(check.finish(started))
}

fn check_monte_carlo(cfg: &VerifyConfig) -> Result<CheckResult> {
    let started = Instant::now();
    let mut check = Check::new("monte_carlo_within_3_sigma", 3.0);
    let spec = ThermalSpec::new(cfg.n_states as f64, 0.0);
    let params = default_params();
    let analytic = run_cooling(&spec, &params, 3)?;
    let stats = monte_carlo(
        &spec,
        0,
        &[params; 3],
        &MonteCarloConfig::new(10_000, cfg.seed),
    )?;
    let (ps, pf) = (analytic.survival_probability, analytic.cooling_probability);
    // deviations in units of σ
    check.observe((stats.empirical_survival() - ps).abs() / stats.survival_sigma(ps));
    let sf = stats.fidelity_sigma(pf);
    let df = (stats.empirical_fidelity() - pf).abs();
    check.observe(match (sf > 0.0, df == 0.0) {
        (true, _) => df / sf,
        (false, true) => 0.0,
        (false, false) => f64::INFINITY,
    });
    Ok(check.finish(started))
}

/// Runs every check. Individual checks fail by reporting `passed = false`;
/// an `Err` means a computation could not be carried out at all.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = check_blocks(cfg, &mut rng);
    out.push(check_dense_blocks(cfg, &mut rng)?);
    out.extend(check_cooling(cfg, &mut rng)?);
    out.extend(check_recursion(cfg, &mut rng)?);
    out.extend(check_strategy_one(cfg, &mut rng)?);
    out.push(check_gap_model(cfg, &mut rng)?);
    out.push(check_optimizer()?);
    out.push(check_kickback(cfg, &mut rng)?);
    out.push(check_monte_carlo(cfg)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            n_states: 6,
            cases: 12,
            seed: 3,
        };
        let results = run_all(&cfg).unwrap();
        for r in &results {
            assert!(r.passed, "{r:?}");
            assert!(r.cases > 0, "{r:?}");
        }
    }
}
