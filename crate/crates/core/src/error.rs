use thiserror::Error;

/// Errors raised by the simulation library.
///
/// The variants mirror the three failure classes callers care about: bad
/// configuration (rejected before any work is done), API misuse, and broken
/// internal invariants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("objective returned non-finite value {value} at point {point:?}")]
    NonFinite { value: f64, point: Vec<f64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
