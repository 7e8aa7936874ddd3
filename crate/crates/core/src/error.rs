use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not an order: {0}")]
    NotAnOrder(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("infinite unit group: only Q, imaginary quadratic fields and totally definite quaternion algebras have orders with finite unit group")]
    InfiniteUnitGroup,
    #[error("not a relation: the word does not evaluate to a diagonal matrix")]
    NotARelation,
    #[error("descent obstruction: letter of norm {0} at the maximal position")]
    DescentObstruction(String),
    #[error("not norm-Euclidean here: {0}")]
    NotEuclidean(String),
    #[error("group construction failed: {0}")]
    GroupConstruction(String),
    #[error("{0}")]
    Domain(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Error::InvariantViolation(message.into())
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::UnknownName(_) => 1,
            Error::InvariantViolation(_) => 3,
            _ => 2,
        }
    }
}
