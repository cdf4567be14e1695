use thiserror::Error;

use crate::metric::MetricViolation;

pub type Result<T> = std::result::Result<T, DcovError>;

#[derive(Debug, Error)]
pub enum DcovError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("atom index {index} out of range for a table of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("point kind does not match its metric")]
    KindMismatch,

    #[error("invalid metric table: {0}")]
    InvalidTable(MetricViolation),

    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },

    #[error("x and y parts have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },

    #[error("beta = {beta} outside the admissible range {range}")]
    BetaOutOfRange { beta: f64, range: &'static str },

    #[error("x and y metrics use different exponents ({x} vs {y})")]
    BetaMismatch { x: f64, y: f64 },

    #[error("support size {size} exceeds the cap of {cap} for this method")]
    SupportTooLarge { size: usize, cap: usize },

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("degenerate marginal: distance covariance of the {0} part with itself is zero")]
    DegenerateMarginal(&'static str),

    #[error("quadrature tolerance not reached: value {value:e}, error estimate {error:e}, tolerance {tol:e}")]
    ToleranceNotReached { value: f64, error: f64, tol: f64 },

    #[error("method requires Euclidean coordinates on both sides")]
    NotEuclidean,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent moment flags: {0}")]
    InconsistentFlags(String),

    #[error("input error at {location}: {message}")]
    Input { location: String, message: String },
}

impl DcovError {
    /// True for errors caused by a mathematically inadmissible request
    /// (as opposed to malformed input).
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            DcovError::BetaOutOfRange { .. }
                | DcovError::DegenerateMarginal(_)
                | DcovError::ToleranceNotReached { .. }
                | DcovError::NotEuclidean
                | DcovError::SupportTooLarge { .. }
                | DcovError::InconsistentFlags(_)
        )
    }
}
