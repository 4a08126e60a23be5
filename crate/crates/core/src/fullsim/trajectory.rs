//! Stochastic runs of the reset-on-failure loop.
//!
//! Each trial draws an initial oracle state from the thermal distribution
//! and applies the measurement schedule, sampling every ancilla outcome. An
//! `|e⟩` outcome discards the attempt and starts over from a fresh thermal
//! draw. A trial ends after an attempt with all outcomes `|g⟩` (success), or
//! after `max_attempts` failed attempts.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::shot::{initial_populations, stage_propagators};
use super::{enumerable_size, Ancilla, FullState};
use crate::error::{invalid, Result};
use crate::protocol::CoolingParams;
use crate::thermal::ThermalSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    /// Attempts per trial before it is counted as a failure.
    pub max_attempts: u64,
}

impl MonteCarloConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            max_attempts: 10_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrajectoryStats {
    pub trials: u64,
    /// Trials that completed the schedule within `max_attempts`.
    pub successes: u64,
    /// Attempts over all trials, successful or not.
    pub attempts: u64,
    /// Ancilla measurements over all trials.
    pub measurements: u64,
    /// Successful trials whose final oracle readout was the answer.
    pub answer_hits: u64,
    /// Resets per trial → number of trials.
    pub reset_histogram: BTreeMap<u64, u64>,
    /// Measurements spent by a successful trial → number of trials.
    pub measurements_to_success: BTreeMap<u64, u64>,
}

impl TrajectoryStats {
    /// Fraction of attempts that survived every measurement.
    pub fn empirical_survival(&self) -> f64 {
        self.successes as f64 / self.attempts as f64
    }

    /// Fraction of successful trials that read out the answer.
    pub fn empirical_fidelity(&self) -> f64 {
        self.answer_hits as f64 / self.successes as f64
    }

    /// Binomial standard error of `empirical_survival` around `p`.
    pub fn survival_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.attempts as f64).sqrt()
    }

    pub fn fidelity_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.successes as f64).sqrt()
    }

    fn merge(mut self, other: TrialOutcome) -> Self {
        self.trials += 1;
        self.attempts += other.attempts;
        self.measurements += other.measurements;
        *self.reset_histogram.entry(other.resets()).or_default() += 1;
        if let Some(readout) = other.readout {
            self.successes += 1;
            if readout.is_answer {
                self.answer_hits += 1;
            }
            *self
                .measurements_to_success
                .entry(other.measurements)
                .or_default() += 1;
        }
        self
    }
}

struct Readout {
    is_answer: bool,
}

struct TrialOutcome {
    attempts: u64,
    measurements: u64,
    readout: Option<Readout>,
}

impl TrialOutcome {
    fn resets(&self) -> u64 {
        if self.readout.is_some() {
            self.attempts - 1
        } else {
            self.attempts
        }
    }
}

/// Index drawn from a discrete distribution given by its running sums.
fn sample(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("nonempty distribution");
    let x = u * total;
    cumulative
        .iter()
        .position(|&c| x < c)
        .unwrap_or(cumulative.len() - 1)
}

fn run_trial(
    rng: &mut ChaCha8Rng,
    n: usize,
    w: usize,
    cumulative: &[f64],
    props: &[DMatrix<Complex64>],
    max_attempts: u64,
) -> TrialOutcome {
    let mut out = TrialOutcome {
        attempts: 0,
        measurements: 0,
        readout: None,
    };
    'attempts: while out.attempts < max_attempts {
        out.attempts += 1;
        let start = sample(cumulative, rng.random::<f64>());
        let mut psi = FullState::basis(n, start, Ancilla::Ground);
        for u in props {
            psi.amplitudes = u * &psi.amplitudes;
            out.measurements += 1;
            let p_g = psi.sector_norm_sqr(Ancilla::Ground) / psi.norm_sqr();
            if rng.random::<f64>() >= p_g {
                continue 'attempts;
            }
            psi.project(Ancilla::Ground);
            psi.scale(1.0 / psi.norm_sqr().sqrt());
        }
        // read out the oracle register in its basis
        let mut running = 0.0;
        let probs: Vec<f64> = psi
            .oracle_amplitudes(Ancilla::Ground)
            .iter()
            .map(|a| {
                running += a.norm_sqr();
                running
            })
            .collect();
        let k = sample(&probs, rng.random::<f64>());
        out.readout = Some(Readout { is_answer: k == w });
        break;
    }
    out
}

/// Runs `cfg.trials` independent trials. Trial `i` uses the ChaCha8 stream
/// `i` of `cfg.seed`, so results do not depend on scheduling.
pub fn monte_carlo(
    spec: &ThermalSpec,
    w: usize,
    stages: &[CoolingParams],
    cfg: &MonteCarloConfig,
) -> Result<TrajectoryStats> {
    if cfg.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if cfg.max_attempts == 0 {
        return Err(invalid("max_attempts", "must be at least 1"));
    }
    let n = enumerable_size(spec.n_states)?;
    let pops = initial_populations(spec, w)?;
    let props = stage_propagators(spec, w, stages)?;
    let cumulative: Vec<f64> = pops
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial);
            run_trial(&mut rng, n, w, &cumulative, &props, cfg.max_attempts)
        })
        .collect();

    Ok(outcomes
        .into_iter()
        .fold(TrajectoryStats::default(), TrajectoryStats::merge))
}
