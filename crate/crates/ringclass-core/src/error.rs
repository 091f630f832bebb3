use alloc::string::String;

/// Errors raised by the library. The classes line up with the exit codes of
/// the command line driver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a pole of a meromorphic function.
    #[error("pole: {0}")]
    Pole(String),
    /// Quadrature, iteration or extrapolation failed to converge, or an exact
    /// computation overflowed its integer width.
    #[error("numeric non-convergence: {0}")]
    Numeric(String),
    /// Coefficient data does not reach the range a sum needs.
    #[error("coverage error: {0}")]
    Coverage(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! numeric_err {
    ($($arg:tt)*) => { $crate::Error::Numeric(alloc::format!($($arg)*)) };
}
macro_rules! pole_err {
    ($($arg:tt)*) => { $crate::Error::Pole(alloc::format!($($arg)*)) };
}
macro_rules! coverage_err {
    ($($arg:tt)*) => { $crate::Error::Coverage(alloc::format!($($arg)*)) };
}
pub(crate) use {coverage_err, domain_err, numeric_err, pole_err};
