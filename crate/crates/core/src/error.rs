use alloc::string::String;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure did not reach its tolerance.
    #[error("numeric error: {msg} (achieved {achieved:e})")]
    Numeric { msg: String, achieved: f64 },
    /// The requested accuracy needs more memory than the configured budget.
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>, achieved: f64) -> Error {
    Error::Numeric {
        msg: msg.into(),
        achieved,
    }
}
