use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    /// A tensor arrived with dimensions a layer cannot consume.
    #[error("shape mismatch in {layer}: expected {expected}, got {actual}")]
    ShapeMismatch {
        layer: String,
        expected: String,
        actual: String,
    },

    /// NaN or infinity crossed a layer boundary.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Backward was called without (or with a stale) forward cache.
    #[error("missing or mismatched forward cache for {0}")]
    MissingCache(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NnError>;
