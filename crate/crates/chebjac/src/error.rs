//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid problem, grid, or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A relaxation weight permutation failed validation.
    #[error("invalid ordering: {0}")]
    Ordering(String),

    /// The iteration blew up instead of contracting.
    #[error(
        "diverged at iteration {iteration} with weight {omega:.6} \
         (residual {residual:.3e}, limit {limit:.3e})"
    )]
    Diverged {
        iteration: usize,
        omega: f64,
        residual: f64,
        limit: f64,
    },

    /// Malformed schedule file, config file, or permutation text.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
