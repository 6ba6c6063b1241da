use thiserror::Error;

/// Errors raised by the algebraic kernel and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("homomorphisms have different source or target rings")]
    SourceMismatch,

    #[error("square-zero violation: {0}")]
    SquareZeroViolation(String),

    #[error("invalid ring homomorphism: {0}")]
    InvalidHom(String),

    #[error("element is not a unit: {0}")]
    NotInvertible(String),

    #[error("element does not belong to the ring: {0}")]
    NotInRing(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("t-degree {degree} exceeds the truncation bound {bound}")]
    DegreeOverflow { degree: i64, bound: i64 },

    #[error("the scaling parameter must be nonzero")]
    ZeroLambda,

    #[error("the scalar must be nonzero")]
    ZeroScalar,

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("distribution is not multiplicative: {0}")]
    NotMultiplicative(String),

    #[error("body mismatch: {0}")]
    BodyMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("connection is not integrable: {0}")]
    NotIntegrable(String),

    #[error("tangent cocycle violation: {0}")]
    CocycleViolation(String),

    #[error("hyper-cocycle condition ({index}) failed: {witness}")]
    ConditionFailed { index: u8, witness: String },

    #[error("deformed Higgs bundle failed validation: {0}")]
    ValidationFailed(String),

    #[error("degree window not saturated: dimension {narrow} at the requested window, {wide} after widening")]
    WindowNotSaturated { narrow: usize, wide: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unresolved reference: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
