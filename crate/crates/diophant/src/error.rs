//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A digit or convergent beyond the known horizon of a digit stream was requested.
    #[error("horizon exceeded: index {requested} requested, {available} available")]
    Horizon { requested: usize, available: usize },
    /// A sign could not be certified before the precision cap was reached.
    #[error("indeterminate sign at precision cap of {cap_bits} bits")]
    Indeterminate { cap_bits: u32 },
    /// An input failed a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Textual input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
