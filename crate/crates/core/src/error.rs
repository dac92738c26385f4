//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("nonfinite input: {0}")]
    NumericInput(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("initialization failed: {0}")]
    Init(String),

    #[error("optimizer error at {path}: {message}")]
    Optimizer { path: String, message: String },

    #[error("training aborted at epoch {epoch}: nonfinite loss ({detail})")]
    NonFiniteLoss { epoch: usize, detail: String },

    #[error("capability: {0}")]
    Capability(String),

    #[error("unrecognized format: bad magic {found:?}")]
    BadMagic { found: String },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("truncated payload: {0}")]
    Truncated(String),

    #[error("corrupt payload: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
