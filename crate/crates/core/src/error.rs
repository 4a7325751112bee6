use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A participant or point index is outside the valid range.
    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    /// Cardinal values were requested from a purely ordinal model.
    #[error("the {0} model is ordinal and has no cardinal values; use rank comparisons instead")]
    OrdinalModel(&'static str),

    /// Matrix rows are ragged or operand dimensions disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Every point in the index has been deleted.
    #[error("no live point remains in the index")]
    NoLivePoint,

    /// The point was deleted earlier and cannot be deleted again.
    #[error("point {0} was already deleted")]
    AlreadyDeleted(usize),

    /// A woman's attribute or weight entry is not in the declared value universe.
    #[error("woman {woman} has {kind} value {value} outside the declared value universe")]
    UniverseViolation {
        woman: usize,
        kind: &'static str,
        value: f64,
    },

    /// The matching is not a permutation of the expected size.
    #[error("malformed matching: {0}")]
    MalformedMatching(String),

    /// A market entry expected to be 0 or 1 is something else.
    #[error("{side} entry at ({row}, {col}) is not boolean: {value}")]
    NonBooleanEntry {
        side: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    /// The instance exceeds a hard size guard.
    #[error("{what} requires n <= {limit}, got n = {n}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        n: usize,
    },

    /// A generator threshold parameter is out of range.
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    /// No fixture is registered under this name.
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    /// A market violates a structural invariant of its model.
    #[error("invalid market: {0}")]
    InvalidMarket(String),

    /// A generated instance failed its internal consistency check.
    #[error("construction self-check failed: {0}")]
    Construction(String),

    /// Instance or matching JSON could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
