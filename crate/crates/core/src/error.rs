use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GtiError {
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty graph in {0}")]
    EmptyGraph(PathBuf),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{phase} failed: {message}")]
    Phase { phase: String, message: String },

    #[error("model not trained: {0}")]
    Untrained(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Nn(#[from] gti_nn::NnError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl GtiError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GtiError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn arg(message: impl Into<String>) -> Self {
        GtiError::InvalidArgument(message.into())
    }
}

pub type Result<T> = std::result::Result<T, GtiError>;
