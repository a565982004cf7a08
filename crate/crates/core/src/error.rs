use thiserror::Error;

/// Errors raised by code construction, encoding and simulation setup.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("design parameter {0} is outside the domain of the construction method")]
    InvalidDesignParameter(f64),
    #[error("invalid CRC: {0}")]
    InvalidCrc(String),
    #[error("invalid decoder configuration: {0}")]
    InvalidDecoder(String),
    #[error("invalid staircase configuration: {0}")]
    InvalidStaircase(String),
    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),
    #[error("decoding window is empty")]
    EmptyWindow,
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
