use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Verification failures are not errors; they are reported as data in a
/// [`VerificationReport`](crate::fglaw::VerificationReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact: {0}")]
    InexactDivision(String),
    #[error("parameter `{0}` has no assigned value")]
    UnassignedParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("series has a nonzero constant term and cannot be substituted")]
    NonzeroConstantTerm,
    #[error("linear part is not invertible over the coefficient ring: {0}")]
    SingularLinearPart(String),
    #[error("requested degree {requested} exceeds available precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("formal ring carries no logarithm")]
    MissingLog,
    #[error("unknown catalog entry `{0}`")]
    UnknownRing(String),
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("{0} is not prime")]
    CompositePrime(u64),
    #[error("invalid ghost family: {0}")]
    InvalidGhosts(String),
    #[error("laws are not exact polynomials: {0}")]
    NotExact(String),
    #[error("derivative vanishes at iterate {0}")]
    DerivativeVanishes(String),
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
