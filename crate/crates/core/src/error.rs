use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("precision fault: reconstruction error {max_error:.4} exceeds {threshold}")]
    PrecisionFault { max_error: f64, threshold: f64 },

    #[error("message {message} does not fit in {bits}-bit message space")]
    MessageOutOfRange { message: u64, bits: u32 },

    #[error("unsatisfiable configuration: {0}")]
    Unsatisfiable(String),

    #[error("invalid workload: {0}")]
    Workload(String),

    #[error("key format: {0}")]
    KeyFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
