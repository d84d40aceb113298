use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigensolver failed to converge (dimension {dim})")]
    NoConvergence { dim: usize },

    #[error("vector is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("need at least {required} levels, found {found}")]
    TooFewLevels { required: usize, found: usize },

    #[error("dimension {dim} exceeds the guard of {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
