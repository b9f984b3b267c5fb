use thiserror::Error;

/// Errors raised by the library's validating constructors and operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("invalid social choice rule: {0}")]
    InvalidScr(String),
    #[error("invalid utility table: {0}")]
    InvalidUtility(String),
    #[error("invalid message: {0}")]
    InvalidMessage(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
