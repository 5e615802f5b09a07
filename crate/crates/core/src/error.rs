//! Crate-wide error type.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Tensor/kernel dimensions are inconsistent, zero, overflowing, or not
    /// divisible as an operation requires.
    Shape(String),
    /// A scalar argument is out of its admissible range.
    Param(String),
    /// A training run left the finite regime; the message carries the last
    /// finite epoch and loss.
    Training(String),
    /// Underlying file I/O failed.
    Io(std::io::Error),
    /// A file or config did not parse as the documented format.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Param(msg) => write!(f, "parameter error: {msg}"),
            Error::Training(msg) => write!(f, "training error: {msg}"),
            Error::Io(err) => write!(f, "io error: {err}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
