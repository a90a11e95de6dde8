use thiserror::Error;

/// Errors raised by the fixed-point toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite: pivot {index} = {pivot:.6e} below threshold {threshold:.3e}")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("power iteration did not converge in {iterations} iterations (last estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("matrix is rank deficient (sigma_min/sigma_max = {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("non-finite iterate at step {step}")]
    NonFinite { step: usize },

    #[error("fixed-point hint required for {0}")]
    MissingFixedPoint(&'static str),

    #[error("every sampled pair was skipped: operator is indistinguishable from the identity on the samples")]
    DegenerateSamples,

    #[error("bracket precondition violated: {0}")]
    Bracket(String),

    #[error("sequence tail too short for fitting: {len} usable points, need at least {min}")]
    TailTooShort { len: usize, min: usize },

    #[error("trace has not converged (stop reason {0})")]
    NotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
