use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse interval cell {cell:?}: {reason}")]
    Parse { cell: String, reason: String },

    #[error("invalid interval [{left}, {right}]: {reason}")]
    InvalidInterval {
        left: f64,
        right: f64,
        reason: &'static str,
    },

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error("index {index} out of range ({len} items)")]
    OutOfRange { index: usize, len: usize },

    #[error("curve {0:?} has no region with positive height")]
    NoPositiveHeight(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
