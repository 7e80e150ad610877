use alloc::string::String;
use core::fmt;

/// Errors produced by the simulation core.
///
/// `Config` covers everything a caller can fix by changing parameters;
/// `Numerical` covers runtime linear-algebra failures (e.g. a covariance
/// matrix that is not positive definite).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid or infeasible configuration (dimensions, alphabets, placement).
    Config(String),
    /// Numerical failure, with diagnostics where available.
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
