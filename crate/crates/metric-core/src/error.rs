use thiserror::Error;

/// Failure modes shared by every analysis crate in the workspace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("empty measure after restriction")]
    EmptyMeasure,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("precision loss: {0}")]
    Precision(String),
    #[error("depth error: {0}")]
    Depth(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for errors caused by bad parameters rather than arithmetic trouble.
    pub fn is_domain_like(&self) -> bool {
        !matches!(self, Error::Numeric(_) | Error::Precision(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
