use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The gram matrix of a block is not positive definite at the requested
    /// regularization. Only reachable with `lambda == 0` on a rank-deficient block.
    #[error(
        "rank-deficient block ({rows} rows, pivot {pivot} at column {column}); use lambda > 0"
    )]
    RankDeficientBlock {
        rows: usize,
        column: usize,
        pivot: f64,
    },

    #[error("non-finite iterate detected at iteration {iteration}")]
    DivergenceDetected { iteration: usize },

    #[error("{metric} is undefined: zero-norm denominator")]
    ZeroNorm { metric: &'static str },

    #[error("rank-deficient least-squares problem at column {column}")]
    RankDeficientLsq { column: usize },

    #[error("all-zero block has no nonzero eigenvalue")]
    ZeroBlock,

    #[error("problem of size {rows}x{cols} exceeds the dense oracle limit of {limit}")]
    TooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported Matrix Market format: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
