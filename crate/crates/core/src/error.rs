use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = ArtError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArtError {
    #[error("at least 2 observations are required, got {0}")]
    TooFewObservations(usize),

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("expected dimension {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operation requires a {expected} dataset")]
    WrongKind { expected: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("interval ({start}, {end}] is not inside (0, {n}]")]
    IntervalOutOfBounds { start: usize, end: usize, n: usize },

    #[error("interval of length {len} is shorter than the minimum {min}")]
    IntervalTooShort { len: usize, min: usize },

    #[error("tied scores at positions {first} and {second}; jitter the scores before ranking")]
    TiedScores { first: usize, second: usize },

    #[error("not a permutation of 1..={0}")]
    InvalidPermutation(usize),

    #[error("candidate {candidate} outside [{h}, {upper}] (window h = {h}, n = {n})")]
    CandidateOutOfRange {
        candidate: usize,
        h: usize,
        upper: usize,
        n: usize,
    },

    #[error("{clusters} clusters requested for {n} observations")]
    TooManyClusters { clusters: usize, n: usize },
}

impl ArtError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ArtError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
