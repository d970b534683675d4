use thiserror::Error;

/// Errors raised by the bound, oracle and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula.
    #[error("domain error in {operation}: {reason}")]
    Domain {
        operation: &'static str,
        reason: String,
    },

    /// A named parameter failed validation.
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    /// A dynamic program would exceed the state-step budget.
    #[error("resource guard: {needed} state-steps requested, limit is {limit}")]
    ResourceGuard { needed: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(operation: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        operation,
        reason: reason.into(),
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        field,
        reason: reason.into(),
    }
}
