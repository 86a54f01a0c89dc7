use thiserror::Error;

/// Errors raised by the exact algebra, space, sheaf and spectral layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ill-formed homomorphism: {0}")]
    IllFormedHom(String),

    #[error("subgroups live in different ambient groups")]
    AmbientMismatch,

    #[error("not a complex: {0}")]
    NotAComplex(String),

    #[error("chain mismatch: {0}")]
    ChainMismatch(String),

    #[error("order is not antisymmetric (space is not T0): cycle {}", .cycle.join(" <= "))]
    NotAntisymmetric { cycle: Vec<String> },

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),

    #[error("too many open sets: {count} exceeds cap {cap}")]
    TooManyOpens { count: usize, cap: usize },

    #[error("points {0} and {1} are not comparable")]
    NotComparable(String, String),

    #[error("functoriality violated along {}", .triple.join(" -> "))]
    FunctorialityViolation { triple: Vec<String> },

    #[error("missing restriction {0} -> {1}")]
    MissingRestriction(String, String),

    #[error("set is not open: {0}")]
    NotOpen(String),

    #[error("not a cover: {0}")]
    NotACover(String),

    #[error("naturality violated at {0}")]
    NaturalityViolation(String),

    #[error("input sequence is not exact: {0}")]
    NotExactInput(String),

    #[error("total differential does not square to zero: {0}")]
    SignViolation(String),

    #[error("spectral sequence not stabilized: requested {requested} pages, need at least {bound}")]
    NotStabilized { requested: usize, bound: usize },

    #[error("not a resolution: {0}")]
    NotAResolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
