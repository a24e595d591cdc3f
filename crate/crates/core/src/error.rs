use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shapes are inconsistent for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input matrix or vector contains NaN or infinite entries.
    #[error("input contains non-finite entries")]
    NonFinite,

    /// A covariance matrix failed the positive-definiteness test.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// Parameters violate a validity constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The requested codebook would exceed the configured size cap.
    #[error("codebook size {requested} exceeds cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    /// Message index outside the codebook.
    #[error("message index {index} out of range 1..={count}")]
    IndexOutOfRange { index: u64, count: u64 },

    /// Block size does not evenly divide the sample count.
    #[error("block size {block} does not divide row count {rows}")]
    IndivisibleBlock { rows: usize, block: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
