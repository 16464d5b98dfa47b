use thiserror::Error;

/// Validation and runtime errors for model construction and experiment ops.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed a precondition; the message names the field.
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },

    /// Two objects that must share geometry (dimension, side, grid) disagree.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
}

impl Error {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            message: message.into(),
        }
    }
}
