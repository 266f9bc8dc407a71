use alloc::string::String;

/// Errors raised by the numerical kernels and the certification engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result (or an intermediate exponent) is not representable.
    #[error("range error: {0}")]
    Range(String),
    /// The requested accuracy could not be reached within the configured budget.
    #[error("inconclusive: {what} (achieved bound {achieved:e})")]
    Inconclusive { what: String, achieved: f64 },
    /// Malformed parameters (bad dimensions, empty boxes, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! range {
    ($($arg:tt)*) => { $crate::error::Error::Range(alloc::format!($($arg)*)) };
}
macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::InvalidInput(alloc::format!($($arg)*)) };
}
pub(crate) use {domain, invalid, range};
