use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A parse failure with the byte column where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        Self { column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.column + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("horizon {horizon} is too small: {needed} digits are required")]
    HorizonTooSmall { horizon: usize, needed: usize },

    #[error("expansion does not terminate within {0} digits")]
    NonTerminating(usize),

    #[error("digit {digit} at index {index} is out of range for base {base}")]
    DigitOutOfRange { index: usize, digit: String, base: String },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid sequence rule: {0}")]
    InvalidRule(String),

    #[error("distance is not computable exactly: {0}")]
    Incomparable(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("prefix too short: index {needed} is not covered by {available} digits")]
    PrefixTooShort { needed: usize, available: usize },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("descriptor has bounded exponent: {0}")]
    Bounded(String),
}
