use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown name `{name}` at position {position}")]
    UnknownName { name: String, position: usize },
    #[error("arity mismatch for `{name}` at position {position}: expected {expected}, found {found}")]
    ArityMismatch {
        name: String,
        position: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("variable p{0} is not assigned")]
    UnassignedVariable(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("{pointer}: {message}")]
    Spec { pointer: String, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::CapExceeded(msg.into())
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
