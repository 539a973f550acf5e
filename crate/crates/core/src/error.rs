use thiserror::Error;

/// Errors shared by every lab operation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// A precondition on the mathematical inputs does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    /// A function or table was read outside the range it was built for.
    #[error("range error: {0}")]
    Range(String),
    /// The request would exceed a memory or work budget.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A search ran out of its node or time budget.
    #[error("timeout: {0}")]
    Timeout(String),
    /// Bad configuration (unknown parameter, unparsable value, ...).
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Range(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Capacity(msg.into()))
}
