//! The two-step swap protocol.
//!
//! Step 1 runs with `γ = 0` for `t₁ = (π/2 + π·j₁)/δ₁`, which turns every
//! generic block into a swap so that a `|g⟩` outcome rules out all states
//! except `|w⟩` and `|w+1⟩`. Step 2 runs with `γ = -1/2` for
//! `t₂ = (π/2 + π·j₂)/δ₂`, making the neighbour block a swap. Two `|g⟩`
//! outcomes leave the oracle in `|w⟩` with certainty.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{run_schedule, CoolingParams, CoolingReport};
use crate::blockmath::{block_for_type, survival_prob, BlockType};
use crate::error::{invalid, Result};
use crate::thermal::{ground_state_population, SpectrumModel, ThermalSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyOneConfig {
    pub delta1: f64,
    pub delta2: f64,
    pub j1: u32,
    pub j2: u32,
}

impl StrategyOneConfig {
    pub fn new(delta1: f64, delta2: f64) -> Self {
        Self {
            delta1,
            delta2,
            j1: 0,
            j2: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {d}")));
            }
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        (FRAC_PI_2 + PI * f64::from(self.j1)) / self.delta1
    }

    pub fn t2(&self) -> f64 {
        (FRAC_PI_2 + PI * f64::from(self.j2)) / self.delta2
    }

    /// Parameters of the two measurement rounds.
    pub fn stages(&self) -> [CoolingParams; 2] {
        [
            CoolingParams::new(0.0, self.delta1, self.t1()),
            CoolingParams::new(-0.5, self.delta2, self.t2()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOneReport {
    pub report: CoolingReport,
    pub p0: f64,
    /// Answer retention in each step.
    pub b0_step1: f64,
    pub b0_step2: f64,
    /// Joint probability of two `|g⟩` outcomes with the oracle in `|w⟩`.
    pub p_success: f64,
    /// Closed-form success probability with the `(1/4)/(δ²+1/4)` factor
    /// applied to both steps.
    pub formula_estimate: f64,
    /// `p₀·(1 - δ_m²/(δ_m² + 1/4))`, `δ_m = max(δ₁, δ₂)`.
    pub lower_bound: f64,
    pub lower_bound_holds: bool,
}

/// Per-step factor `cos²(Ωt) + (1/4)/(δ²+1/4)·sin²(Ωt)` with
/// `Ω = sqrt(δ² + 1/4)` and `t = (π/2 + πj)/δ`.
fn two_step_factor(delta: f64, j: u32) -> f64 {
    let omega = (delta * delta + 0.25).sqrt();
    let phase = omega * (FRAC_PI_2 + PI * f64::from(j)) / delta;
    let (s, c) = phase.sin_cos();
    c * c + 0.25 / (delta * delta + 0.25) * s * s
}

/// Success probability with the same `1/4` factor in both steps.
pub fn two_step_estimate(p0: f64, cfg: &StrategyOneConfig) -> f64 {
    p0 * two_step_factor(cfg.delta1, cfg.j1) * two_step_factor(cfg.delta2, cfg.j2)
}

pub fn two_step_lower_bound(p0: f64, cfg: &StrategyOneConfig) -> f64 {
    let dm = cfg.delta1.max(cfg.delta2);
    p0 * (1.0 - dm * dm / (dm * dm + 0.25))
}

pub fn strategy_one(spec: &ThermalSpec, cfg: &StrategyOneConfig) -> Result<StrategyOneReport> {
    cfg.validate()?;
    if spec.spectrum != SpectrumModel::Degenerate {
        return Err(invalid(
            "spectrum",
            "the swap protocol needs a degenerate spectrum",
        ));
    }
    let p0 = ground_state_population(spec)?;
    let [s1, s2] = cfg.stages();
    let b0_step1 = survival_prob(&block_for_type(BlockType::Answer, s1.gamma, s1.delta), s1.t);
    let b0_step2 = survival_prob(&block_for_type(BlockType::Answer, s2.gamma, s2.delta), s2.t);
    let report = run_schedule(spec, &[s1, s2])?;
    let p_success = p0 * b0_step1 * b0_step2;
    let lower_bound = two_step_lower_bound(p0, cfg);
    Ok(StrategyOneReport {
        report,
        p0,
        b0_step1,
        b0_step2,
        p_success,
        formula_estimate: two_step_estimate(p0, cfg),
        lower_bound,
        lower_bound_holds: p_success >= lower_bound,
    })
}
