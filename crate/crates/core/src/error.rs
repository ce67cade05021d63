use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FmrError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FmrError {
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("noise variance must be non-negative, got {0}")]
    NegativeVariance(f64),

    #[error("degenerate sampling grid: {0}")]
    DegenerateGrid(String),

    #[error("basis function is unbounded here: {0}")]
    DomainError(String),

    #[error("invalid basis parameters: {0}")]
    ParamError(String),

    #[error("direct evaluation is unstable for order {order} (limit {limit})")]
    StabilityError { order: usize, limit: usize },

    #[error("grid of {samples} samples is too coarse for order bound K={k} (need at least {required})")]
    UnderResolved { samples: usize, k: usize, required: usize },

    #[error("sinogram is not on the expected warped grid: {0}")]
    GridMismatch(String),

    #[error("moment set is missing order ({n}, {m})")]
    IncompleteMomentSet { n: i32, m: i32 },

    #[error("fractional power of a signed coordinate: {0}")]
    FractionalPowerOfNegative(String),

    #[error("series truncation did not converge: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TruncationNotConverged { tail: f64, tol: f64 },

    #[error("phase-cancellation constraint violated: sum of m*k is {0}, expected 0")]
    ConstraintViolated(i64),

    #[error("factor ({n}, {m}) has modulus {modulus:e} below the guard for a negative power")]
    NearZeroFactor { n: i32, m: i32, modulus: f64 },

    #[error("feature layouts differ")]
    LayoutMismatch,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("image dimensions differ: {0:?} vs {1:?}")]
    DimMismatch((usize, usize), (usize, usize)),

    #[error("image too small: {0}")]
    TooSmall(String),

    #[error("dataset is empty or too small: {0}")]
    EmptyDataset(String),

    #[error("bad hash length {0} (need at least 8)")]
    BadLength(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FmrError {
    pub(crate) fn format(what: &'static str, reason: impl Into<String>) -> Self {
        FmrError::Format { what, reason: reason.into() }
    }
}
