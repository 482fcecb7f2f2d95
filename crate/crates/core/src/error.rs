use thiserror::Error;

/// Failure classes, used by the command line to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Validation,
    Resource,
    Inconclusive,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::Validation => 3,
            ErrorClass::Resource => 4,
            ErrorClass::Inconclusive => 5,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    /// A fusion-ring axiom or structural invariant failed.
    #[error("{invariant} violated at {location}")]
    Axiom {
        invariant: &'static str,
        location: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) => ErrorClass::Parse,
            Error::Axiom { .. }
            | Error::Invalid(_)
            | Error::Unsupported(_)
            | Error::NotConverged(_) => ErrorClass::Validation,
            Error::Resource(_) => ErrorClass::Resource,
            Error::Inconclusive(_) => ErrorClass::Inconclusive,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
