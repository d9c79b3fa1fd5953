//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the measurement/recovery pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("wrong vector length: expected {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("truncation length {n} out of range 1..={dim}")]
    TruncationOutOfRange { n: usize, dim: usize },

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-positive first-band entry {value:e} at index {index}; noise is inadmissible or the sampling point is bad")]
    NonPositiveFirstBand { index: usize, value: f64 },

    #[error("degenerate null space: smallest/largest singular value ratio {ratio:e}")]
    DegenerateNullSpace { ratio: f64 },

    #[error("inadmissible noise: {value:e} reaches or exceeds the admissible threshold {threshold:e}")]
    InadmissibleNoise { value: f64, threshold: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad inputs).
    ///
    /// The CLI maps these to exit code 2; everything else is a
    /// validation error and maps to exit code 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveFirstBand { .. }
                | Error::DegenerateNullSpace { .. }
                | Error::InadmissibleNoise { .. }
        )
    }
}
