use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bandlimit: {0}")]
    InvalidBandlimit(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scale range: J0 = {j0} must be below J = {j_max}")]
    InvalidScaleRange { j0: usize, j_max: usize },

    #[error("invalid scale {scale}: expected {j0} <= j <= {j_max}")]
    InvalidScale { scale: usize, j0: usize, j_max: usize },

    #[error("invalid path depth: {0}")]
    InvalidDepth(i64),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("rejected configuration: {0}")]
    RejectedConfiguration(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
