use thiserror::Error;

/// Errors raised by graph construction, set operations and the counting engines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("no path between vertices {from} and {to}")]
    NoPath { from: u32, to: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("regularity violation at line {line}: {message}")]
    Regularity { line: usize, message: String },

    #[error("bipartiteness violation at line {line}: {message}")]
    Bipartiteness { line: usize, message: String },

    #[error("cover infeasible: {0}")]
    Infeasible(String),

    #[error("enumeration limit of {limit} exceeded after {progress} candidates: {context}")]
    EnumerationLimit {
        limit: u64,
        progress: u64,
        context: String,
    },

    #[error("randomized construction failed after {retries} retries: {observed}")]
    RandomizedFailure { retries: u32, observed: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that signal an exhausted computational budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::EnumerationLimit { .. } | Error::SizeLimit(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
