use thiserror::Error;

/// Errors produced by the configuration, evaluation and quadrature layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {point:?} lies within {distance:e} of charge {index}")]
    SingularPoint {
        point: Vec<f64>,
        index: usize,
        distance: f64,
    },

    #[error("point {0:?} is not strictly inside the unit ball")]
    OutsideBall(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("quadrature did not converge after {evals} evaluations (estimate {value} ± {error})")]
    NonConvergence { evals: u64, value: f64, error: f64 },

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
