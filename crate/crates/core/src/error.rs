use thiserror::Error;

/// Errors raised by the numeration, function and spectral layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A convergent denominator would exceed `2^63 - 1`.
    #[error(
        "convergent denominator overflow at index {index}; largest safe index is {largest_safe}"
    )]
    Overflow { index: usize, largest_safe: usize },

    /// A partial quotient was requested past the end of a finite quotient list.
    #[error("partial quotient a_{index} unavailable: explicit list has {available} entries")]
    Index { index: usize, available: usize },

    /// An argument lies outside the range supported by the current scale.
    #[error("out of range: {0}")]
    Range(String),

    /// A digit string or atom table violates its invariants.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A transform length exceeds the configured cap.
    #[error("length {len} exceeds the cap {cap}")]
    Cap { len: u64, cap: u64 },

    /// A textual spec could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
