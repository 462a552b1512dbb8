use std::fmt;

use thiserror::Error;

/// Location-carrying failure from the space-file parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    /// A malformed option value such as a bound name or stride rule.
    #[error("invalid argument: {0}")]
    Syntax(String),
    #[error("invalid probability space: {0}")]
    Space(String),
    #[error("event `{name}` (index {index}) has zero probability")]
    ZeroProbability { index: usize, name: String },
    #[error("{0}")]
    Domain(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable process exit code for the CLI and the C API.
    pub fn code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Syntax(_) | Error::Space(_) => 2,
            Error::ZeroProbability { .. } | Error::Domain(_) => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
