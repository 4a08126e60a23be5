use crate::error::{invalid, Error, Result};
use crate::thermal::{boltzmann_factor, ThermalSpec};

/// Upper estimate of the measurements needed to reach `target`:
/// `log_{1/b₂}( P·N / (1 - P - a·P) )`, clamped at 0.
///
/// Returns `+∞` when `b₂ ≥ 1` (no filtering).
pub fn measurement_bound(spec: &ThermalSpec, b2: f64, target: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&b2) {
        return Err(invalid("b2", format!("must lie in [0, 1], got {b2}")));
    }
    let a = boltzmann_factor(spec)?;
    let limit = 1.0 - a;
    if !(target < limit) {
        return Err(Error::BoundInvalid { target, limit });
    }
    if target <= 0.0 {
        return Ok(0.0);
    }
    if b2 >= 1.0 {
        return Ok(f64::INFINITY);
    }
    if b2 == 0.0 {
        return Ok(0.0);
    }
    let arg = target * spec.n_states / (1.0 - target - a * target);
    Ok((arg.ln() / (1.0 / b2).ln()).max(0.0))
}

/// Probability that at least one of `k` independent copies succeeds.
pub fn copies_success(p_s: f64, k: u32) -> f64 {
    1.0 - (1.0 - p_s).powi(k as i32)
}

/// Minimal number of copies `K ≥ 1` with `1 - (1-p_s)^K ≥ target`.
pub fn copies_needed(p_s: f64, target: f64) -> Result<u32> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(invalid("p_s", format!("must lie in [0, 1], got {p_s}")));
    }
    if !(target < 1.0) {
        return Err(invalid(
            "P_target",
            format!("must be below 1, got {target}"),
        ));
    }
    if target <= p_s {
        return Ok(1);
    }
    if p_s == 0.0 {
        return Err(invalid(
            "p_s",
            "zero success probability never reaches a positive target",
        ));
    }
    let estimate = ((1.0 - target).ln() / (1.0 - p_s).ln()).ceil().max(1.0);
    if estimate > f64::from(u32::MAX - 1) {
        return Err(invalid("P_target", "needs more than u32::MAX copies"));
    }
    // guard the ceil against rounding on either side
    let mut k = (estimate as u32).saturating_sub(1).max(1);
    while copies_success(p_s, k) < target {
        k += 1;
    }
    Ok(k)
}
