use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated (bad subset, bad index, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Polynomials or presentations over incompatible variable tables.
    #[error("structural error: {0}")]
    Structural(String),

    /// A class was required to be homogeneous of a given degree and is not.
    #[error("degree error: {0}")]
    Degree(String),

    /// A walk is not a superset-first ordering of its family.
    #[error("walk order error: {0}")]
    WalkOrder(String),

    /// A variable assignment does not induce a well-defined ring map.
    #[error("ill-defined map: relation `{relation}` does not map into the target ideal")]
    Map { relation: String },

    /// Refusal to run an instance above the configured size caps.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
