use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CrkdError>;

#[derive(Debug, Error)]
pub enum CrkdError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported resolution {resolution}: {reason}")]
    UnsupportedResolution { resolution: usize, reason: String },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("truncated file {path}: header declares {expected} payload bytes, found {actual}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    #[error("model is frozen: attempted to update parameter `{0}`")]
    FrozenModel(String),

    #[error("training diverged at epoch {epoch} (non-finite loss); last good checkpoint: {last_good:?}")]
    Diverged {
        epoch: usize,
        last_good: Option<PathBuf>,
    },
}

impl CrkdError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CrkdError::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CrkdError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CrkdError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        CrkdError::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
