use thiserror::Error;

/// Crate-wide error type.
///
/// `NonConvergence` carries the last iterate so a caller can inspect or dump
/// a failed solve instead of getting a silent partial answer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(
        "solver did not converge: {context} (iterations {iterations}, energy {energy:.6e}, residual {residual:.3e})"
    )]
    NonConvergence {
        context: String,
        iterations: usize,
        energy: f64,
        residual: f64,
        /// Last iterate, for post-mortem inspection.
        last_iterate: Vec<f64>,
    },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
