use thiserror::Error;

/// Errors raised while designing or configuring filter banks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: no convergence after {iterations} iterations")]
    NumericalFailure { iterations: usize },

    #[error("ill-conditioned matrix: condition estimate {estimate:e} exceeds bound {bound:e}")]
    IllConditioned { estimate: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
