use thiserror::Error;

/// Errors produced by the library.
///
/// A single enum is shared by all modules; the variant names mirror the
/// failure modes callers are expected to branch on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid cone specification: {0}")]
    InvalidSpec(String),
    #[error("requested region is empty for this cone: {0}")]
    EmptyRegion(String),
    #[error("bad bisection endpoints: {0}")]
    BadEndpoints(String),
    #[error("point is not exterior to the cone (margin {margin})")]
    NotExterior { margin: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("the cone induces a total order; no incomparable element exists")]
    TotalOrder,
    #[error("search budget exhausted after {attempts} attempts")]
    BudgetExhausted { attempts: usize },
    #[error("functional is not positive on the cone: {0}")]
    NotPositiveFunctional(String),
    #[error("point is not a nonzero element of the cone: {0}")]
    NotInCone(String),
    #[error("map is not a cone automorphism: {0}")]
    NotAutomorphism(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the functional vanishes on every extremal of the cone")]
    NoExtremalWithPositivePairing,
    #[error("no witness for any n <= {n_max}")]
    NotFoundWithinRange { n_max: usize },
    #[error("matrix has a negative entry")]
    NotNonnegative,
    #[error("matrix is singular")]
    Singular,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, stable across releases; used as a machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFinite => "NonFinite",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::EmptyRegion(_) => "EmptyRegion",
            Error::BadEndpoints(_) => "BadEndpoints",
            Error::NotExterior { .. } => "NotExterior",
            Error::Unsupported(_) => "Unsupported",
            Error::TotalOrder => "TotalOrder",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::NotPositiveFunctional(_) => "NotPositiveFunctional",
            Error::NotInCone(_) => "NotInCone",
            Error::NotAutomorphism(_) => "NotAutomorphism",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NoExtremalWithPositivePairing => "NoExtremalWithPositivePairing",
            Error::NotFoundWithinRange { .. } => "NotFoundWithinRange",
            Error::NotNonnegative => "NotNonnegative",
            Error::Singular => "Singular",
            Error::Parse { .. } => "Parse",
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolated(msg.into())
    }
}
