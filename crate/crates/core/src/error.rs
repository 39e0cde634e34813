use thiserror::Error;

#[derive(Debug, Error)]
pub enum PyramidError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("instance generation failed: {0}")]
    Generation(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PyramidError> = std::result::Result<T, E>;
