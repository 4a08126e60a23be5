use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{build_hamiltonian, enumerable_size, Ancilla, FullState};
use crate::error::Result;
use crate::protocol::{CoolingParams, CoolingReport, TraceRow};
use crate::thermal::{state_populations, ThermalSpec};

/// Propagators for each stage, reusing the decomposition for repeated
/// parameters.
pub(crate) fn stage_propagators(
    spec: &ThermalSpec,
    w: usize,
    stages: &[CoolingParams],
) -> Result<Vec<DMatrix<Complex64>>> {
    let n = enumerable_size(spec.n_states)?;
    let mut cache: Vec<(CoolingParams, DMatrix<Complex64>)> = Vec::new();
    let mut out = Vec::with_capacity(stages.len());
    for p in stages {
        p.validate()?;
        if let Some((_, u)) = cache.iter().find(|(q, _)| q == p) {
            out.push(u.clone());
            continue;
        }
        let h = build_hamiltonian(n, w, p.gamma, p.delta, &spec.spectrum)?;
        let u = h.propagator(p.t)?;
        cache.push((*p, u.clone()));
        out.push(u);
    }
    Ok(out)
}

pub(crate) fn initial_populations(spec: &ThermalSpec, w: usize) -> Result<Vec<f64>> {
    let n = enumerable_size(spec.n_states)?;
    let energies = spec.spectrum.energies(n, w)?;
    state_populations(spec, &energies)
}

/// Conditional cooling computed on the full register.
///
/// The thermal mixture is propagated as one pure run per basis state,
/// weighted by its population; the conditioned oracle state is the
/// normalized sum of the surviving `|g⟩` components.
pub fn run_shot_cooling(
    spec: &ThermalSpec,
    w: usize,
    stages: &[CoolingParams],
) -> Result<CoolingReport> {
    let n = enumerable_size(spec.n_states)?;
    let pops = initial_populations(spec, w)?;
    let props = stage_propagators(spec, w, stages)?;

    // per initial state: ‖ψ‖² and |ψ(k, g)|² after each stage
    let runs: Vec<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|start| {
            let mut psi = FullState::basis(n, start, Ancilla::Ground);
            let mut rows = Vec::with_capacity(props.len() + 1);
            rows.push(oracle_populations(&psi));
            for u in &props {
                psi.amplitudes = u * &psi.amplitudes;
                psi.project(Ancilla::Ground);
                rows.push(oracle_populations(&psi));
            }
            rows
        })
        .collect();

    let mut trace = Vec::with_capacity(props.len() + 1);
    for m in 0..=props.len() {
        let mut rho_diag = vec![0.0; n];
        let mut from_answer = 0.0;
        for (start, rows) in runs.iter().enumerate() {
            let surviving: f64 = rows[m].iter().sum();
            if start == w {
                from_answer = pops[start] * surviving;
            }
            for (k, &x) in rows[m].iter().enumerate() {
                rho_diag[k] += pops[start] * x;
            }
        }
        let survival: f64 = rho_diag.iter().sum();
        if !(survival > 0.0) {
            return Err(crate::error::Error::ZeroSurvival);
        }
        rho_diag.iter_mut().for_each(|x| *x /= survival);
        trace.push((from_answer / survival, survival, rho_diag));
    }

    let (cooling, survival, rho) = trace.last().cloned().expect("trace is nonempty");
    Ok(CoolingReport {
        cooling_probability: cooling,
        survival_probability: survival,
        conditional_fidelity: rho[w],
        trace: trace
            .into_iter()
            .enumerate()
            .map(|(m, (c, s, weights))| TraceRow {
                m: m as u32,
                cooling_probability: c,
                survival_probability: s,
                weights,
            })
            .collect(),
    })
}

fn oracle_populations(psi: &FullState) -> Vec<f64> {
    psi.oracle_amplitudes(Ancilla::Ground)
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}
