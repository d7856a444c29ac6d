use thiserror::Error;

/// Errors raised by the library.
///
/// `Validation` covers malformed structural input (shapes, ranks, levels),
/// `Domain` covers mathematically inadmissible input (non-positive elements,
/// grids that miss the spectrum), `Resource` covers desk-scale guards.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Domain(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
