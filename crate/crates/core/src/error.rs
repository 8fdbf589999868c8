use thiserror::Error;

/// Errors produced by the robust beamforming library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },

    #[error("dimension mismatch in `{field}`: expected {expected}, found {found}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("beamformer is the zero vector")]
    ZeroBeamformer,

    #[error("channel estimate `{0}` is the zero vector")]
    ZeroChannel(&'static str),

    #[error("matrix is zero; no principal eigenpair")]
    ZeroMatrix,

    #[error("instance is infeasible (margin {margin:e})")]
    InfeasibleInstance { margin: f64 },

    #[error("recovery matrix is numerically singular (smallest eigenvalue {min_eig:e})")]
    DegenerateRecovery { min_eig: f64 },

    #[error("tolerance not reached: {what} = {value:e}")]
    ToleranceNotReached { what: &'static str, value: f64 },

    #[error("invalid simulation config `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("trial {index}: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
