use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent caller input (length mismatch, index out of range, ...).
    #[error("invalid input: {0}")]
    Input(String),
    /// Operation attempted in the wrong protocol phase or on a consumed register.
    #[error("invalid state: {0}")]
    State(String),
    /// The inner ciphertext failed to authenticate or parse.
    #[error("decryption failed: {0}")]
    Decryption(String),
    /// The binding-commitment extractor could not parse the commitment.
    #[error("extraction failed: {0}")]
    Extraction(String),
    /// Requested dimension exceeds the enumeration budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// A serialized object could not be decoded.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
