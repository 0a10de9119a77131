use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("defining polynomial has a rational root {0}")]
    NotIrreducible(String),
    #[error("defining polynomial has {0} real roots, expected 3")]
    NotTotallyReal(usize),
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("inverse of zero")]
    ZeroInversion,
    #[error("element {0} is not totally positive")]
    NotTotallyPositive(String),
    #[error("element {0} is not a unit")]
    NotAUnit(String),
    #[error("generators are rationally dependent")]
    DependentGenerators,
    #[error("cone needs 1 to 3 generators, got {0}")]
    BadArity(usize),
    #[error("sign undecided at the precision cap of {0} bits")]
    PrecisionExhausted(u32),
    #[error("sign condition failed for bracket {0}")]
    SignConditionFailed(String),
    #[error("set is empty")]
    EmptySet,
    #[error("translate ({0}, {1}) lies on the search window boundary")]
    WindowExceeded(i64, i64),
    #[error("inclusion violated: {0}")]
    InclusionViolated(String),
    #[error("unit inequality chain {0} fails")]
    FixgiViolated(u8),
    #[error("projection basis is degenerate")]
    DegenerateBasis,
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
