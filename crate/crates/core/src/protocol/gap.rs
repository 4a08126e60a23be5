//! Cooling with a split excited spectrum, run at the parameters tuned for
//! the degenerate oracle.

use super::{initial_weights, weights_after, CoolingParams};
use crate::error::{invalid, Result};
use crate::thermal::{SpectrumModel, SplitAssignment, ThermalSpec};

/// `W₀(M)` for a split-spectrum oracle.
pub fn gap_model_probability(spec: &ThermalSpec, params: &CoolingParams, m: u32) -> Result<f64> {
    if !matches!(spec.spectrum, SpectrumModel::Split { .. }) {
        return Err(invalid("spectrum", "gap model needs a split spectrum"));
    }
    let ws0 = initial_weights(spec, params)?;
    Ok(weights_after(&ws0, m)?.answer_weight())
}

/// `W₀(M)` for each of the twelve corner assignments at gap `r`.
pub fn gap_corner_probabilities(
    spec: &ThermalSpec,
    params: &CoolingParams,
    m: u32,
    r: f64,
) -> Result<Vec<(SplitAssignment, f64)>> {
    SplitAssignment::corners()
        .into_iter()
        .map(|assignment| {
            let s = spec.with_spectrum(SpectrumModel::Split { r, assignment });
            Ok((assignment, gap_model_probability(&s, params, m)?))
        })
        .collect()
}

/// Worst case of `W₀(M)` over the corner assignments.
pub fn min_gap_probability(
    spec: &ThermalSpec,
    params: &CoolingParams,
    m: u32,
    r: f64,
) -> Result<f64> {
    Ok(gap_corner_probabilities(spec, params, m, r)?
        .into_iter()
        .map(|(_, p)| p)
        .fold(f64::INFINITY, f64::min))
}
