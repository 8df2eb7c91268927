use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A decode mode was applied to a sketch kind it does not support.
    #[error("decode mode error: {0}")]
    Mode(String),

    #[error("support size {support} exceeds sparsity budget {k}")]
    Sparsity { support: usize, k: usize },

    /// A construction was asked for something it is not defined on.
    #[error("unsupported construction: {0}")]
    Capability(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Training { epoch: usize, loss: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
