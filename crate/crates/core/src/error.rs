use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unsupported derivative order {order}: {reason}")]
    UnsupportedOrder { order: u32, reason: String },

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
