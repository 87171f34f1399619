use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A structural contract on an argument (symmetry, shape) does not hold.
    #[error("contract violation: {0}")]
    ContractViolation(String),
    /// The request would exceed a hard size cap.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// Two independent computation paths disagree.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
