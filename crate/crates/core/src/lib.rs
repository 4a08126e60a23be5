//! Ground-state cooling of a Grover oracle by selective ancilla measurements.
//!
//! The oracle `H₀ = ε(I - |w⟩⟨w|)` is coupled to an ancilla qubit on a ring,
//! evolved for a fixed time, and the ancilla is measured. Keeping only `|g⟩`
//! outcomes filters the oracle towards its ground state `|w⟩`.
//!
//! - [`blockmath`]: closed-form 2×2 block propagators and retentions.
//! - [`thermal`]: Gibbs initial populations and temperature bookkeeping.
//! - [`protocol`]: the conditioned weight recursion, both cooling strategies,
//!   measurement-count bounds and the split-spectrum model.
//! - [`optimizer`]: parameter choice for the fixed-parameter strategy.
//! - [`fullsim`]: dense reference simulator, Monte Carlo trajectories and the
//!   phase-kickback readout.
//! - [`verify`]: the block-versus-dense equivalence suite.
//! - [`cli`]: the experiment runner behind the `gscqc` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockmath;
pub mod cli;
pub mod error;
pub mod fullsim;
pub mod optimizer;
pub mod protocol;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
