//! Parameter selection for the fixed-parameter protocol.
//!
//! The answer block must return to `|g⟩` exactly after each interval, which
//! pins its Rabi phase to a multiple of π:
//! `sqrt(δ² + (1/2 - γ)²)·t = π·n`. On that branch γ is the only free
//! parameter, and it is chosen to maximize the leakage of the generic block
//! `(δ²/(δ²+γ²))·sin²(sqrt(δ²+γ²)·t) = 1 - b₂`.

use std::f64::consts::{PI, TAU};

use crate::blockmath::{block_for_type, survival_prob, BlockType};
use crate::error::{invalid, Error, Result};
use crate::protocol::CoolingParams;

const GRID_POINTS: usize = 1000;
const GAMMA_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub gamma: f64,
    pub delta: f64,
    pub t: f64,
    pub branch: u32,
    /// `1 - b₂` at the optimum.
    pub objective: f64,
    pub b0_residual: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl OptimizationResult {
    pub fn params(&self) -> CoolingParams {
        CoolingParams::new(self.gamma, self.delta, self.t)
    }
}

fn check_branch(n: u32) -> Result<()> {
    if n == 0 {
        return Err(invalid("branch", "must be a positive integer"));
    }
    Ok(())
}

/// Coupling on branch `n` at `t = 2π`: `δ = sqrt(γ(1-γ) + (n²-1)/4)`.
pub fn delta_from_gamma(gamma: f64, n: u32) -> Result<f64> {
    check_branch(n)?;
    let nf = f64::from(n);
    let radicand = gamma * (1.0 - gamma) + 0.25 * (nf * nf - 1.0);
    if radicand < 0.0 {
        return Err(invalid(
            "gamma",
            format!("γ = {gamma} gives a negative δ² on branch {n}"),
        ));
    }
    Ok(radicand.sqrt())
}

/// Coupling on branch `n` for arbitrary `t`:
/// `δ² = (π·n/t)² - (1/2 - γ)²`. Reduces to [`delta_from_gamma`] at `t = 2π`.
pub fn branch_delta(gamma: f64, t: f64, n: u32) -> Result<f64> {
    check_branch(n)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be finite and > 0, got {t}")));
    }
    let freq = PI * f64::from(n) / t;
    let offset = 0.5 - gamma;
    let radicand = (freq - offset) * (freq + offset);
    // endpoints of the feasible interval can round slightly negative
    if radicand < -1e-14 {
        return Err(invalid(
            "gamma",
            format!("γ = {gamma} is outside the feasible interval for t = {t}, branch {n}"),
        ));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Feasible γ range `[1/2 - πn/t, 1/2 + πn/t]` of branch `n`.
pub fn feasible_interval(t: f64, n: u32) -> Result<(f64, f64)> {
    check_branch(n)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Infeasible { t, branch: n });
    }
    let half = PI * f64::from(n) / t;
    Ok((0.5 - half, 0.5 + half))
}

/// Generic-block leakage on branch `n`, equal to `1 - b₂`.
pub fn objective(gamma: f64, t: f64, n: u32) -> Result<f64> {
    let delta = branch_delta(gamma, t, n)?;
    Ok(leakage(gamma, delta, t))
}

fn leakage(gamma: f64, delta: f64, t: f64) -> f64 {
    let omega2 = delta * delta + gamma * gamma;
    if omega2 == 0.0 {
        return 0.0;
    }
    let s = (omega2.sqrt() * t).sin();
    delta * delta / omega2 * s * s
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximizes the generic leakage over γ on branch `n` for a fixed `t`.
///
/// A grid scan picks the best basin (smallest γ among ties), then a
/// golden-section search refines within the neighbouring grid cells.
pub fn optimize_params(t: f64, n: u32) -> Result<OptimizationResult> {
    let (lo, hi) = feasible_interval(t, n)?;
    if !(hi > lo) {
        return Err(Error::Infeasible { t, branch: n });
    }
    let f = |g: f64| objective(g, t, n).unwrap_or(f64::NEG_INFINITY);

    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..GRID_POINTS)
        .map(|i| {
            let g = if i == GRID_POINTS - 1 {
                hi
            } else {
                lo + step * i as f64
            };
            (g, f(g))
        })
        .collect();
    let best = grid.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::Infeasible { t, branch: n });
    }
    let idx = grid
        .iter()
        .position(|p| p.1 >= best - TIE_TOL)
        .expect("the maximum is attained on the grid");

    let a = grid[idx.saturating_sub(1)].0;
    let b = grid[(idx + 1).min(GRID_POINTS - 1)].0;
    let (mut gamma, mut value) = golden_section_max(f, a, b, GAMMA_TOL);
    if grid[idx].1 > value {
        (gamma, value) = grid[idx];
    }

    let delta = branch_delta(gamma, t, n)?;
    let b0 = survival_prob(&block_for_type(BlockType::Answer, gamma, delta), t);
    let b1 = survival_prob(&block_for_type(BlockType::Neighbor, gamma, delta), t);
    let b2 = survival_prob(&block_for_type(BlockType::Generic, gamma, delta), t);
    Ok(OptimizationResult {
        gamma,
        delta,
        t,
        branch: n,
        objective: value,
        b0_residual: (1.0 - b0).abs(),
        b0,
        b1,
        b2,
    })
}

/// Optimum of the default branch at `t = 2π`.
pub fn default_params() -> CoolingParams {
    optimize_params(TAU, 1)
        .expect("t = 2π, n = 1 is feasible")
        .params()
}
