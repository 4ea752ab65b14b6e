use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure failed to reach its tolerance.
    #[error("numeric error: {message} (partial value {partial:e}, error estimate {error:e})")]
    Numeric {
        message: String,
        partial: f64,
        error: f64,
    },
    /// The parameters describe a cycle that does not operate as an engine.
    #[error("engine invalid: {0}")]
    EngineInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}
