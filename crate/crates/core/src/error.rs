use thiserror::Error;

/// Errors surfaced by the exact-arithmetic and cover-analysis layers.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different coefficient fields")]
    FieldMismatch,

    #[error("not a prime: {0}")]
    NotPrime(u64),

    #[error("modulus of degree {degree} is not irreducible over F_{p}")]
    ReducibleModulus { p: u64, degree: usize },

    #[error("unsplit pole: denominator factor `{factor}` has no root in the coefficient field (minimal splitting extension degree {min_degree})")]
    UnsplitPole { factor: String, min_degree: usize },

    #[error("specialization pole: a coefficient denominator vanishes at the requested parameter value")]
    SpecializationPole,

    #[error("Frobenius inverse is unavailable over a parametric field")]
    ParametricFrobenius,

    #[error("coefficient `{value}` has no p-th root in the coefficient field")]
    NoPthRoot { value: String },

    #[error("parametric fields support a single transcendental; nested parameters are not supported")]
    NestedParameter,

    #[error("Witt vector shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("Witt level {n} exceeds the configured cap {cap} (universal polynomials blow up)")]
    LevelCap { n: usize, cap: usize },

    #[error("order drop: the first entry reduces to a constant, so the vector does not define a cover of full p-power order")]
    OrderDrop,

    #[error("invalid branching datum: {0}")]
    InvalidDatum(String),

    #[error("inadmissible conductor tuple: {0}")]
    InadmissibleTuple(String),

    #[error("deformation construction failed: {0}")]
    ConstructionFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
