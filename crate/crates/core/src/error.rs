use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("not a bridge: {0}")]
    NotABridge(String),

    #[error("bridges cross, no transport exists: {0}")]
    Perpendicular(String),

    #[error("bridges coincide: {0}")]
    SameBridge(String),

    #[error("undecided length: element has a path of length {len}, guard allows {max}")]
    UndecidedLength { len: usize, max: usize },

    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),

    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-planar diagram: {0}")]
    NonPlanar(String),

    #[error("crossingless closed component: {0}")]
    ClosedComponent(String),

    #[error("not an identity entry: {0}")]
    NotAnIdentityEntry(String),

    #[error("grading mismatch: {0}")]
    Grading(String),

    #[error("structure does not satisfy the type D relation: {0}")]
    NotTypeD(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
