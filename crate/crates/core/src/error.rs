use thiserror::Error;

/// Errors produced by the simulator and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("survival probability is zero; the conditioned state is undefined")]
    ZeroSurvival,

    #[error("target probability {target} is unreachable: answer retention {b_answer} does not exceed the largest competing retention {b_max}")]
    Unreachable {
        target: f64,
        b_answer: f64,
        b_max: f64,
    },

    #[error("measurement bound precondition violated: need P < 1 - a = {limit}, got {target}")]
    BoundInvalid { target: f64, limit: f64 },

    #[error("no feasible coupling for t = {t}, branch {branch}")]
    Infeasible { t: f64, branch: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
