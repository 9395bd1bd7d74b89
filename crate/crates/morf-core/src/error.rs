//! Error type shared across the pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorfError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("sequence error: {0}")]
    Sequence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("annotation error: {0}")]
    Annotation(String),

    #[error("validation error for sequence '{id}': {reason}")]
    Validation { id: String, reason: String },

    #[error("feature error: {0}")]
    Feature(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("synthetic spec error: {0}")]
    SynthSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, MorfError>;
