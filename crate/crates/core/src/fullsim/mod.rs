//! Brute-force simulation of the joint oracle + ancilla register.
//!
//! States live in a `2N`-dimensional space with basis index `2n + s`,
//! `s = 0` for ancilla `|g⟩` and `s = 1` for `|e⟩`. Evolution uses a dense
//! Hermitian eigendecomposition and never touches the 2×2 block formulas,
//! so it serves as an independent reference for them.

mod kickback;
mod shot;
mod trajectory;

pub use kickback::{phase_kickback, KickbackOutcome};
pub use shot::run_shot_cooling;
pub use trajectory::{monte_carlo, MonteCarloConfig, TrajectoryStats};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::thermal::SpectrumModel;

/// Largest register the dense simulator accepts.
pub const MAX_STATES: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ancilla outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ancilla {
    Ground = 0,
    Excited = 1,
}

#[inline]
pub fn index(n: usize, s: Ancilla) -> usize {
    2 * n + s as usize
}

fn check_size(n_states: usize, w: usize) -> Result<()> {
    if !(2..=MAX_STATES).contains(&n_states) {
        return Err(invalid(
            "N",
            format!("full simulation needs 2 <= N <= {MAX_STATES}, got {n_states}"),
        ));
    }
    if w >= n_states {
        return Err(invalid(
            "w",
            format!("must be below N = {n_states}, got {w}"),
        ));
    }
    Ok(())
}

/// Amplitudes over the joint basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub amplitudes: DVector<Complex64>,
}

impl FullState {
    /// `|n⟩ ⊗ |s⟩` in a register of `n_states` oracle states.
    pub fn basis(n_states: usize, n: usize, s: Ancilla) -> Self {
        let mut amplitudes = DVector::from_element(2 * n_states, ZERO);
        amplitudes[index(n, s)] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `|ψ⟩ ⊗ |g⟩` for an oracle state `ψ`.
    pub fn with_ground_ancilla(oracle: &[Complex64]) -> Self {
        let mut amplitudes = DVector::from_element(2 * oracle.len(), ZERO);
        for (n, &a) in oracle.iter().enumerate() {
            amplitudes[index(n, Ancilla::Ground)] = a;
        }
        Self { amplitudes }
    }

    pub fn n_states(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability weight of one ancilla sector.
    pub fn sector_norm_sqr(&self, s: Ancilla) -> f64 {
        (0..self.n_states())
            .map(|n| self.amplitudes[index(n, s)].norm_sqr())
            .sum()
    }

    /// Zeroes the other ancilla sector without renormalizing.
    pub fn project(&mut self, s: Ancilla) {
        let other = match s {
            Ancilla::Ground => Ancilla::Excited,
            Ancilla::Excited => Ancilla::Ground,
        };
        for n in 0..self.n_states() {
            self.amplitudes[index(n, other)] = ZERO;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// Oracle amplitudes of one ancilla sector.
    pub fn oracle_amplitudes(&self, s: Ancilla) -> Vec<Complex64> {
        (0..self.n_states())
            .map(|n| self.amplitudes[index(n, s)])
            .collect()
    }
}

/// The `2N × 2N` joint Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    pub matrix: DMatrix<Complex64>,
    pub n_states: usize,
    pub w: usize,
}

/// `H = H₀⊗I + γ(|g⟩⟨g| - |e⟩⟨e|) + δ·Σ_n (|n,e⟩⟨n+1,g| + h.c.)`, with the
/// ring closed by `|N⟩ ≡ |0⟩`.
pub fn build_hamiltonian(
    n_states: usize,
    w: usize,
    gamma: f64,
    delta: f64,
    spectrum: &SpectrumModel,
) -> Result<DenseHamiltonian> {
    check_size(n_states, w)?;
    let energies = spectrum.energies(n_states, w)?;
    let dim = 2 * n_states;
    let mut h = DMatrix::from_element(dim, dim, ZERO);
    for (n, &e) in energies.iter().enumerate() {
        h[(index(n, Ancilla::Ground), index(n, Ancilla::Ground))] = Complex64::new(e + gamma, 0.0);
        h[(index(n, Ancilla::Excited), index(n, Ancilla::Excited))] =
            Complex64::new(e - gamma, 0.0);
    }
    for n in 0..n_states {
        let i = index(n, Ancilla::Excited);
        let j = index((n + 1) % n_states, Ancilla::Ground);
        h[(i, j)] += Complex64::new(delta, 0.0);
        h[(j, i)] += Complex64::new(delta, 0.0);
    }
    Ok(DenseHamiltonian {
        matrix: h,
        n_states,
        w,
    })
}

impl DenseHamiltonian {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = checked_eigen(&self.matrix)?;
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// `exp(-i·H·t)`.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<Complex64>> {
        hermitian_expm(&self.matrix, t)
    }
}

fn checked_eigen(
    m: &DMatrix<Complex64>,
) -> Result<nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Decomposition("eigensolver did not converge".into()))?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::Decomposition("non-finite eigenvalue".into()));
    }
    Ok(eig)
}

/// `exp(-i·H·t)` for Hermitian `H`, via `H = Q·Λ·Q†`.
pub fn hermitian_expm(h: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    let eig = checked_eigen(h)?;
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(scaled * q.adjoint())
}

pub fn evolve(state: &FullState, h: &DenseHamiltonian, t: f64) -> Result<FullState> {
    let dim = h.matrix.nrows();
    if state.amplitudes.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: state.amplitudes.len(),
        });
    }
    let u = h.propagator(t)?;
    Ok(FullState {
        amplitudes: u * &state.amplitudes,
    })
}

/// Outcome probabilities of a projective ancilla measurement and the
/// renormalized post-measurement states (absent for a zero-weight sector).
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaMeasurement {
    pub p_g: f64,
    pub post_g: Option<FullState>,
    pub post_e: Option<FullState>,
}

pub fn measure_ancilla(state: &FullState) -> Result<AncillaMeasurement> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(
            "state",
            format!("must be normalized, norm² = {norm}"),
        ));
    }
    let post = |s: Ancilla| {
        let weight = state.sector_norm_sqr(s);
        (weight > 0.0).then(|| {
            let mut p = state.clone();
            p.project(s);
            p.scale(1.0 / weight.sqrt());
            p
        })
    };
    Ok(AncillaMeasurement {
        p_g: state.sector_norm_sqr(Ancilla::Ground),
        post_g: post(Ancilla::Ground),
        post_e: post(Ancilla::Excited),
    })
}

/// Checks that the energies of the spectrum can be enumerated as integers.
pub(crate) fn enumerable_size(n_states: f64) -> Result<usize> {
    if n_states.fract() != 0.0 || !(2.0..=MAX_STATES as f64).contains(&n_states) {
        return Err(invalid(
            "N",
            format!("full simulation needs an integer 2 <= N <= {MAX_STATES}, got {n_states}"),
        ));
    }
    Ok(n_states as usize)
}
