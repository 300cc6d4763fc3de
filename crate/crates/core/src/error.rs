use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent or out-of-range `(k, n)` or index arguments.
    #[error("parameter error: {0}")]
    Param(String),
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computed object contradicts an invariant that must always hold.
    #[error("integrity error: {0}")]
    Integrity(String),
    /// Refused up front because the instance is too large.
    #[error("scale guard: {0}")]
    ScaleGuard(String),
    /// Started, then stopped on a resource budget. Never a partial answer.
    #[error("aborted: {0}")]
    Aborted(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

macro_rules! param_err {
    ($($arg:tt)*) => { $crate::error::Error::Param(format!($($arg)*)) };
}
macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! integrity_err {
    ($($arg:tt)*) => { $crate::error::Error::Integrity(format!($($arg)*)) };
}
pub(crate) use {domain_err, integrity_err, param_err};
