//! Measurement-conditioned cooling on the block decomposition.
//!
//! Conditioning on `|g⟩` multiplies the population of every block by its
//! retention `b = |U_gg|²` and renormalizes. All blocks of the same class
//! share one `b`, so the state is kept as a few groups with real-valued
//! multiplicity instead of `N` entries.

mod bounds;
mod gap;
mod strategy;

pub use bounds::{copies_needed, copies_success, measurement_bound};
pub use gap::{gap_corner_probabilities, gap_model_probability, min_gap_probability};
pub use strategy::{
    strategy_one, two_step_estimate, two_step_lower_bound, StrategyOneConfig, StrategyOneReport,
};

use crate::blockmath::{generalized_block, survival_prob, BlockType};
use crate::error::{invalid, Error, Result};
use crate::thermal::{
    bulk_level, degenerate_populations, ground_state_population, BulkPattern, SpectrumModel,
    ThermalSpec,
};

/// Hamiltonian parameters held fixed between two ancilla measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingParams {
    /// Ancilla splitting γ.
    pub gamma: f64,
    /// Ancilla-oracle coupling δ.
    pub delta: f64,
    /// Evolution time between measurements.
    pub t: f64,
}

impl CoolingParams {
    pub fn new(gamma: f64, delta: f64, t: f64) -> Self {
        Self { gamma, delta, t }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(invalid("gamma", "must be finite"));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(invalid(
                "delta",
                format!("must be finite and >= 0, got {}", self.delta),
            ));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(invalid(
                "t",
                format!("must be finite and >= 0, got {}", self.t),
            ));
        }
        Ok(())
    }

    /// Retention of a block with the given neighbouring oracle energies.
    pub fn retention(&self, e_left: f64, e_right: f64) -> f64 {
        survival_prob(
            &generalized_block(e_left, e_right, self.gamma, self.delta),
            self.t,
        )
    }
}

/// One class of blocks sharing the same energies and hence the same `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightGroup {
    pub class: BlockType,
    /// Oracle energy of `|n-1⟩`.
    pub e_left: f64,
    /// Oracle energy of `|n⟩`.
    pub e_right: f64,
    /// Population of a single member block.
    pub weight: f64,
    pub multiplicity: f64,
    /// Probability of the `|g⟩` outcome for a member block.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    pub groups: Vec<WeightGroup>,
    /// Probability that every measurement so far returned `|g⟩`.
    pub survival: f64,
    pub m_done: u32,
}

impl WeightState {
    /// Conditional population of the answer state `W₀`.
    pub fn answer_weight(&self) -> f64 {
        self.class_weight(BlockType::Answer)
    }

    pub fn class_weight(&self, class: BlockType) -> f64 {
        self.groups
            .iter()
            .filter(|g| g.class == class)
            .map(|g| g.weight * g.multiplicity)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.groups.iter().map(|g| g.weight * g.multiplicity).sum()
    }

    pub fn answer_retention(&self) -> Option<f64> {
        self.groups
            .iter()
            .find(|g| g.class == BlockType::Answer)
            .map(|g| g.b)
    }

    /// Largest retention among populated non-answer groups.
    pub fn max_competing_retention(&self) -> f64 {
        self.groups
            .iter()
            .filter(|g| g.class != BlockType::Answer && g.weight > 0.0)
            .map(|g| g.b)
            .fold(0.0, f64::max)
    }

    /// Same populations, retentions recomputed for new parameters.
    pub fn with_params(&self, params: &CoolingParams) -> WeightState {
        let mut out = self.clone();
        for g in &mut out.groups {
            g.b = params.retention(g.e_left, g.e_right);
        }
        out
    }
}

/// Groups for the initial Gibbs state, each tagged with the retention
/// under `params`.
pub fn initial_weights(spec: &ThermalSpec, params: &CoolingParams) -> Result<WeightState> {
    spec.validate()?;
    params.validate()?;
    let n = spec.n_states;
    // (class, e_left, e_right, multiplicity)
    let mut layout: Vec<(BlockType, f64, f64, f64)> = Vec::new();
    match spec.spectrum {
        SpectrumModel::Degenerate => {
            layout.push((BlockType::Answer, 1.0, 0.0, 1.0));
            layout.push((BlockType::Neighbor, 0.0, 1.0, 1.0));
            layout.push((BlockType::Generic, 1.0, 1.0, n - 2.0));
        }
        SpectrumModel::Split { r, assignment } => {
            let before = assignment.before.energy(r);
            let after = assignment.after.energy(r);
            layout.push((BlockType::Answer, before, 0.0, 1.0));
            layout.push((BlockType::Neighbor, 0.0, after, 1.0));
            let bulk = n - 3.0;
            if bulk < 1.0 {
                layout.push((BlockType::Generic, after, before, 1.0));
            } else {
                let first = bulk_level(assignment.bulk, 0).energy(r);
                let last_is_odd = (bulk - 1.0) % 2.0 == 1.0;
                let last = bulk_level(assignment.bulk, usize::from(last_is_odd)).energy(r);
                let (lo, hi) = (1.0 - r, 1.0 + r);
                layout.push((BlockType::Generic, after, first, 1.0));
                let interior = bulk - 1.0;
                match assignment.bulk {
                    BulkPattern::AllLow => layout.push((BlockType::Generic, lo, lo, interior)),
                    BulkPattern::AllHigh => layout.push((BlockType::Generic, hi, hi, interior)),
                    BulkPattern::Alternating => {
                        layout.push((BlockType::Generic, lo, hi, (interior / 2.0).ceil()));
                        layout.push((BlockType::Generic, hi, lo, (interior / 2.0).floor()));
                    }
                }
                layout.push((BlockType::Generic, last, before, 1.0));
            }
        }
    }

    let p0 = match spec.spectrum {
        SpectrumModel::Degenerate => degenerate_populations(spec)?.ground,
        SpectrumModel::Split { .. } => ground_state_population(spec)?,
    };
    let excited_weight = |e: f64| -> Result<f64> {
        match spec.spectrum {
            SpectrumModel::Degenerate => Ok(degenerate_populations(spec)?.excited),
            SpectrumModel::Split { .. } => Ok(p0 * spec.relative_weight(e)?),
        }
    };

    let mut groups = Vec::with_capacity(layout.len());
    for (class, e_left, e_right, multiplicity) in layout {
        if multiplicity <= 0.0 {
            continue;
        }
        let weight = if class == BlockType::Answer {
            p0
        } else {
            excited_weight(e_right)?
        };
        if weight <= 0.0 {
            continue;
        }
        groups.push(WeightGroup {
            class,
            e_left,
            e_right,
            weight,
            multiplicity,
            b: params.retention(e_left, e_right),
        });
    }
    Ok(WeightState {
        groups,
        survival: 1.0,
        m_done: 0,
    })
}

/// One conditioned measurement: `W_i ← b_i·A·W_i`.
pub fn step(ws: &WeightState) -> Result<WeightState> {
    let kept: f64 = ws
        .groups
        .iter()
        .map(|g| g.b * g.weight * g.multiplicity)
        .sum();
    if !(kept > 0.0) {
        return Err(Error::ZeroSurvival);
    }
    let mut out = ws.clone();
    for g in &mut out.groups {
        g.weight = g.b * g.weight / kept;
    }
    out.survival = ws.survival * kept;
    out.m_done = ws.m_done + 1;
    Ok(out)
}

/// `ln(w·mult·b^M)` for a group, `-∞` for an empty term.
fn log_term(g: &WeightGroup, m: u32) -> f64 {
    if g.weight <= 0.0 || g.multiplicity <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let lb = if m == 0 {
        0.0
    } else if g.b > 0.0 {
        f64::from(m) * g.b.ln()
    } else {
        return f64::NEG_INFINITY;
    };
    g.weight.ln() + g.multiplicity.ln() + lb
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Closed form after `m` further measurements with unchanged retentions:
/// `W_i(M) = W_i(0)·b_i^M / Σ_j W_j(0)·b_j^M·mult_j`.
///
/// Evaluated in log space so that `b^M` may underflow without losing the
/// ratio.
pub fn weights_after(ws0: &WeightState, m: u32) -> Result<WeightState> {
    if m == 0 {
        return Ok(ws0.clone());
    }
    let terms: Vec<f64> = ws0.groups.iter().map(|g| log_term(g, m)).collect();
    let log_total = log_sum_exp(terms.iter().copied());
    if log_total == f64::NEG_INFINITY {
        return Err(Error::ZeroSurvival);
    }
    let mut out = ws0.clone();
    for (g, &lt) in out.groups.iter_mut().zip(&terms) {
        g.weight = if lt == f64::NEG_INFINITY {
            0.0
        } else {
            (lt - g.multiplicity.ln() - log_total).exp()
        };
    }
    out.survival = ws0.survival * log_total.exp();
    out.m_done = ws0.m_done + m;
    Ok(out)
}

/// `W₀` after `m` measurements, without materializing the state.
fn answer_weight_after(ws0: &WeightState, m: u32) -> f64 {
    let terms: Vec<f64> = ws0.groups.iter().map(|g| log_term(g, m)).collect();
    let log_total = log_sum_exp(terms.iter().copied());
    let log_answer = log_sum_exp(
        ws0.groups
            .iter()
            .zip(&terms)
            .filter(|(g, _)| g.class == BlockType::Answer)
            .map(|(_, &t)| t)
            .collect::<Vec<_>>()
            .into_iter(),
    );
    if log_answer == f64::NEG_INFINITY {
        0.0
    } else {
        (log_answer - log_total).exp()
    }
}

/// Per-measurement record of a cooling run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub m: u32,
    pub cooling_probability: f64,
    pub survival_probability: f64,
    /// Per-member weight of each group, in the order of `WeightState::groups`.
    pub weights: Vec<f64>,
}

impl TraceRow {
    fn of(ws: &WeightState) -> Self {
        Self {
            m: ws.m_done,
            cooling_probability: ws.answer_weight(),
            survival_probability: ws.survival,
            weights: ws.groups.iter().map(|g| g.weight).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingReport {
    /// `W₀(M)`.
    pub cooling_probability: f64,
    pub survival_probability: f64,
    /// `⟨w|ρ_or(M)|w⟩`.
    pub conditional_fidelity: f64,
    /// Rows for `m = 0..=M`.
    pub trace: Vec<TraceRow>,
}

/// Runs a schedule of measurement rounds, each with its own parameters.
pub fn run_schedule(spec: &ThermalSpec, stages: &[CoolingParams]) -> Result<CoolingReport> {
    let first = stages
        .first()
        .copied()
        .unwrap_or(CoolingParams::new(0.0, 0.0, 0.0));
    let mut ws = initial_weights(spec, &first)?;
    let mut trace = vec![TraceRow::of(&ws)];
    for params in stages {
        params.validate()?;
        ws = step(&ws.with_params(params))?;
        trace.push(TraceRow::of(&ws));
    }
    // the block states stay diag(0, 1), so the ensemble is diagonal in the
    // oracle basis and the answer overlap is the answer weight
    let w0 = ws.answer_weight();
    Ok(CoolingReport {
        cooling_probability: w0,
        survival_probability: ws.survival,
        conditional_fidelity: w0,
        trace,
    })
}

/// Fixed-parameter cooling with `m` measurements.
pub fn run_cooling(spec: &ThermalSpec, params: &CoolingParams, m: u32) -> Result<CoolingReport> {
    let ws0 = initial_weights(spec, params)?;
    let mut trace = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        trace.push(TraceRow::of(&weights_after(&ws0, k)?));
    }
    let last = trace.last().expect("trace has at least one row");
    Ok(CoolingReport {
        cooling_probability: last.cooling_probability,
        survival_probability: last.survival_probability,
        conditional_fidelity: last.cooling_probability,
        trace,
    })
}

/// Smallest `M` with `W₀(M) ≥ target`.
pub fn min_measurements(spec: &ThermalSpec, params: &CoolingParams, target: f64) -> Result<u32> {
    if !(target.is_finite() && target < 1.0) {
        return Err(invalid(
            "P_target",
            format!("must be below 1, got {target}"),
        ));
    }
    let ws0 = initial_weights(spec, params)?;
    if ws0.answer_weight() >= target {
        return Ok(0);
    }
    let b_answer = ws0.answer_retention().unwrap_or(0.0);
    let b_max = ws0.max_competing_retention();
    let unreachable = Error::Unreachable {
        target,
        b_answer,
        b_max,
    };
    if b_answer <= b_max {
        return Err(unreachable);
    }
    // W₀(M) is nondecreasing here; bracket by doubling, then bisect.
    let mut hi: u32 = 1;
    while answer_weight_after(&ws0, hi) < target {
        if hi >= 1 << 30 {
            return Err(unreachable);
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if answer_weight_after(&ws0, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
