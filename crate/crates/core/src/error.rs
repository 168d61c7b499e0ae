use alloc::string::String;

/// Errors raised by generators, renderers and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the supported range (infeasible spacing, maze
    /// too small, bad probability, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// An operation was called with inputs that break its precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An exact enumeration or a step loop ran past its budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! param_err {
    ($($arg:tt)*) => { $crate::error::Error::Parameter(alloc::format!($($arg)*)) };
}
macro_rules! contract_err {
    ($($arg:tt)*) => { $crate::error::Error::Contract(alloc::format!($($arg)*)) };
}
pub(crate) use contract_err;
pub(crate) use param_err;
