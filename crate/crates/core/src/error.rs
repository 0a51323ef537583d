use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different quadratic fields")]
    FieldMismatch,
    #[error("lattice basis is not full rank")]
    DegenerateLattice,
    #[error("lattice is not contained in the ambient lattice")]
    NotContained,
    #[error("curve is not well defined on this surface")]
    CurveNotWellDefined,
    #[error("self-intersection undefined here: the curves coincide")]
    IdenticalCurves,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("could not parse group word {word:?}: {reason}")]
    WordParse { word: String, reason: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invariant form solution space has dimension {0}, expected 1")]
    FormDimension(usize),
    #[error("matrix is not invertible over the ring")]
    NotInvertible,
}

pub type Result<T> = std::result::Result<T, Error>;
