use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A malformed statement in an election or RBDS file.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A value that violates a data-model invariant.
    #[error("{0}")]
    Invalid(String),

    /// An operation was called outside its documented precondition.
    #[error("precondition: {0}")]
    Precondition(String),

    #[error("empty restriction")]
    EmptyRestriction,

    #[error("no votes")]
    NoVotes,

    /// An exhaustive routine would exceed its configured limit.
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
