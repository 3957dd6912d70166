//! Crate-wide error type. Structural problems (malformed input) are
//! distinguished from failed mathematical checks, which always carry a
//! concrete witness.

/// Errors produced by constructors and operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input is structurally malformed (wrong arity, degree, index…).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A mathematical precondition or identity failed; the message names the
    /// check and the witness (first failing word and value).
    #[error("{check} failed: {witness}")]
    CheckFailed { check: String, witness: String },
    /// The requested operation is not defined for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn check(check: impl Into<String>, witness: impl Into<String>) -> Error {
        Error::CheckFailed {
            check: check.into(),
            witness: witness.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
