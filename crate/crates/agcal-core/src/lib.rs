//! Symbolic-numeric engine for generalized numbers and generalized functions
//! built over asymptotic gauges.
//!
//! The crate is `no_std` and only needs `alloc`. Floating point special
//! functions come from `libm`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod embedding;
pub mod gauges;
pub mod gen_functions;
pub mod gen_numbers;
pub mod index_core;
pub mod linalg;
pub mod math;
pub mod ode_gen;
pub mod profiles;
pub mod quadrature;
pub mod rate_dsl;

use alloc::string::String;
use core::fmt;

/// Errors raised by engine operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument is malformed or out of range.
    Argument(String),
    /// A documented precondition does not hold.
    Precondition(String),
    /// The requested operation is not available for this representation.
    Capability(String),
    /// A numeric routine could not reach its tolerance.
    Numeric(String),
    /// Failure inside the rate-expression layer.
    Rate(rate_dsl::RateError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(m) => write!(f, "argument error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
            Error::Capability(m) => write!(f, "capability error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::Rate(e) => write!(f, "{e}"),
        }
    }
}

impl From<rate_dsl::RateError> for Error {
    fn from(e: rate_dsl::RateError) -> Self {
        Error::Rate(e)
    }
}

pub type Result<T> = core::result::Result<T, Error>;

/// Engine version reported by every scenario run.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
