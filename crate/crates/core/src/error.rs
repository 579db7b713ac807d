use thiserror::Error;

/// Errors surfaced by the library.
///
/// Contract violations (bad dimensions, infeasible actions, invalid
/// parameters) are distinguished from numerical failures (an iterative
/// solve that did not reach its residual target) so that callers can
/// map them to different exit codes.
#[derive(Debug, Error)]
pub enum AdpError {
    #[error("dimension mismatch: expected {expected} states, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("time index {k} is outside the revealed horizon {horizon}")]
    OutOfHorizon { k: usize, horizon: usize },

    #[error("action {action} is not feasible at state {state}")]
    InfeasibleAction { state: usize, action: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, AdpError>;
