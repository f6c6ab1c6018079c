//! Error types shared across the laboratory.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong arity, symbol out of alphabet, bad parameter.
    #[error("input error: {0}")]
    Input(String),

    /// An enumeration would exceed its configured budget.
    #[error("capacity error: {what} requires {required} items, cap is {cap}")]
    Capacity {
        what: String,
        required: u128,
        cap: u128,
    },

    /// A mathematical invariant failed to hold on the given data
    /// (non-unitary matrix, non-orthogonal vectors, invalid KS set, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested imperfection model is not defined for this game's
    /// measurement structure (e.g. bit-flip noise on non-bit outcomes).
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn capacity(what: impl Into<String>, required: u128, cap: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            required,
            cap,
        }
    }
}
