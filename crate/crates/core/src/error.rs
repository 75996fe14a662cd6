//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by weight construction, statistics, inference, and
/// simulation.
///
/// The CLI maps `Io`/`Parse` to exit code 1 and everything else
/// (invalid parameters, statistical degeneracy) to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors of statistical substance (as opposed to I/O trouble).
    pub fn is_statistical(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Parse(_))
    }
}
