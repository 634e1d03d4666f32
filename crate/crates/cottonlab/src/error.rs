use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("mixing rings: {0}")]
    MixedRing(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid slot: {0}")]
    Slot(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("schema violation at `{key}`: {msg}")]
    Schema { key: String, msg: String },
    #[error("non-canonical index key `{0}`")]
    NonCanonicalKey(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
