use thiserror::Error;

/// Errors surfaced by every layer of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} (cap {cap}){hint}")]
    Capacity {
        what: String,
        cap: usize,
        hint: String,
    },

    #[error("not a CM Galois datum: {0}")]
    NotCmDatum(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn capacity(what: impl Into<String>, cap: usize, hint: impl Into<String>) -> Self {
        let hint = hint.into();
        Error::Capacity {
            what: what.into(),
            cap,
            hint: if hint.is_empty() {
                hint
            } else {
                format!("; {hint}")
            },
        }
    }

    /// True for the error kinds the command line reports with exit code 3.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
