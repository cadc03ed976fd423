use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no convergence in {what}: {terms} terms used, tail bound {tail:e}")]
    NonConvergence {
        what: String,
        terms: usize,
        tail: f64,
    },
    #[error("point outside the domain: {0}")]
    DomainError(String),
    #[error("branch ambiguity: {0}")]
    BranchError(String),
    #[error("series valuation: {0}")]
    ValuationError(String),
    #[error("index out of range: {0}")]
    IndexError(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("fit failed: {0}")]
    FitError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainError(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
