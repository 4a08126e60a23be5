//! One-measurement readout for a known answer: Hadamard on the ancilla,
//! controlled `U = exp(-iπH₀)`, Hadamard, measure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{hermitian_expm, index, Ancilla, FullState, MAX_STATES};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KickbackOutcome {
    pub p_g: f64,
    /// Normalized oracle state after the `|g⟩` outcome.
    pub post_g: Option<Vec<Complex64>>,
}

fn hadamard_ancilla(state: &mut FullState) {
    for n in 0..state.n_states() {
        let g = state.amplitudes[index(n, Ancilla::Ground)];
        let e = state.amplitudes[index(n, Ancilla::Excited)];
        state.amplitudes[index(n, Ancilla::Ground)] = (g + e) * FRAC_1_SQRT_2;
        state.amplitudes[index(n, Ancilla::Excited)] = (g - e) * FRAC_1_SQRT_2;
    }
}

pub fn phase_kickback(psi: &[Complex64], w: usize) -> Result<KickbackOutcome> {
    let n = psi.len();
    if !(2..=MAX_STATES).contains(&n) {
        return Err(invalid(
            "N",
            format!("must lie in [2, {MAX_STATES}], got {n}"),
        ));
    }
    if w >= n {
        return Err(invalid("w", format!("must be below N = {n}, got {w}")));
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(
            "psi",
            format!("must be normalized, norm² = {norm}"),
        ));
    }

    let mut h0 = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in (0..n).filter(|&k| k != w) {
        h0[(k, k)] = Complex64::new(1.0, 0.0);
    }
    let u = hermitian_expm(&h0, PI)?;

    let mut state = FullState::with_ground_ancilla(psi);
    hadamard_ancilla(&mut state);
    // controlled-U acts on the |e⟩ sector
    let excited = DVector::from_vec(state.oracle_amplitudes(Ancilla::Excited));
    let kicked = u * excited;
    for k in 0..n {
        state.amplitudes[index(k, Ancilla::Excited)] = kicked[k];
    }
    hadamard_ancilla(&mut state);

    let p_g = state.sector_norm_sqr(Ancilla::Ground);
    // below this the |g⟩ outcome is numerically impossible
    let post_g = (p_g > 1e-24).then(|| {
        let scale = 1.0 / p_g.sqrt();
        state
            .oracle_amplitudes(Ancilla::Ground)
            .into_iter()
            .map(|a| a * scale)
            .collect()
    });
    Ok(KickbackOutcome { p_g, post_g })
}
