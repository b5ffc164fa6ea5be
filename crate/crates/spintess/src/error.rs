//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// All arithmetic on vertex coordinates is checked; an overflow is reported
/// as an error rather than silently wrapping, since every computation here
/// is meant to be exact.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero denominator with zero numerator is not a point")]
    ZeroOverZero,

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("({0}, {1}) is not an edge of the base tesselation")]
    NotAnEdge(String, String),

    #[error("edge ({0}, {1}) is not present in this tesselation")]
    EdgeNotPresent(String, String),

    #[error("edge word is malformed: {0}")]
    BadEdgeWord(String),

    #[error("cannot parse `{input}` as a word: {reason}")]
    WordParse { input: String, reason: String },

    #[error("cannot parse `{0}` as a rational point")]
    RationalParse(String),

    #[error("piecewise map is invalid: {0}")]
    BadPiecewise(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
