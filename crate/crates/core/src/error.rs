use thiserror::Error;

pub type Result<T> = std::result::Result<T, PaError>;

#[derive(Debug, Error)]
pub enum PaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A construction was asked to run outside the hypotheses of the result it relies on.
    #[error("precondition of {theorem} violated: {detail}")]
    Precondition {
        theorem: &'static str,
        detail: String,
    },

    #[error("index out of range: {0}")]
    Range(String),

    /// A feasibility guard refused the request.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        PaError::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        PaError::Resource(msg.into())
    }
}
