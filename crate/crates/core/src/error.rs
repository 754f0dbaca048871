use std::path::PathBuf;

use crate::fields::StateFields;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("state outside the equation-of-state domain: {0}")]
    Domain(String),

    #[error("non-finite function value at {at}")]
    Evaluation { at: f64 },

    #[error("pressure inversion failed: {0}")]
    Inversion(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("{path}: row {row}: {message}")]
    Format {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("degenerate directions: {0}")]
    DegenerateDirection(String),

    #[error("time step failed: {0}")]
    TimeStep(String),

    #[error("simulation aborted at t = {t}: {reason}")]
    SimulationAborted {
        t: f64,
        reason: String,
        last_state: Box<StateFields>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
