use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("arity {arity} exceeds the cap of {cap} for {what}")]
    ArityCap {
        arity: usize,
        cap: usize,
        what: &'static str,
    },
    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),
    #[error("invalid language: {0}")]
    InvalidLanguage(String),
    #[error("weight range violation: {0}")]
    WeightRange(String),
    #[error("variable index {index} out of range (have {nvars} variables)")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("degree {have} exceeds the admissible degree {limit}")]
    DegreeExcess { have: usize, limit: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle cap exceeded: {nvars} variables > cap {cap}")]
    OracleCap { nvars: usize, cap: usize },
    #[error("no implementation of {target} found: {reason}")]
    NoImplementation { target: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
