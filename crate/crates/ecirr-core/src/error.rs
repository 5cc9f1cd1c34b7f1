//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Variant names
//! are part of the CLI contract: `ecirr` prints [`Error::name`] on domain
//! failures, so renaming a variant is a breaking change.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The characteristic must be an odd prime.
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    /// Primes are capped so that products of residues fit the internal
    /// accumulator layout.
    #[error("prime {0} exceeds the supported bound 2^31")]
    PrimeTooLarge(u64),
    /// The supplied modulus factors over F_p.
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    /// Operands live in different field contexts.
    #[error("field context mismatch")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    /// Enumeration-backed operation on a field above the configured cap.
    #[error("field with {needed} elements exceeds the enumeration cap {cap}")]
    FieldTooLarge { needed: u128, cap: u64 },
    /// gcd(0, 0) is undefined.
    #[error("gcd of two zero polynomials")]
    BothZero,
    /// Operation requires a polynomial of positive degree.
    #[error("polynomial has degree zero (or is zero)")]
    DegreeZero,
    /// Equal-degree splitting gave up; practically unreachable for valid
    /// inputs (each attempt succeeds with probability about 1/2).
    #[error("equal-degree splitting did not converge after {0} attempts")]
    SplitRetriesExceeded(u32),
    #[error("invalid rational map: {0}")]
    InvalidMap(String),
    #[error("curve is singular: 4A^3 + 27B^2 = 0")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    /// Quadratic-order operands with different D.
    #[error("quadratic order mismatch")]
    OrderMismatch,
    /// Exact division failed; the quotient is not in the order.
    #[error("not divisible in the quadratic order")]
    NotDivisible,
    /// alpha does not satisfy the valuation preconditions (prime norm,
    /// unramified, not associate to its conjugate).
    #[error("degenerate alpha: {0}")]
    DegenerateAlpha(String),
    /// No element of the order has the requested trace and norm.
    #[error("no element of discriminant {disc} has trace {t} and norm {q0}")]
    NotInOrder { disc: i64, t: i64, q0: u64 },
    /// Every admissible factor choice kept the degree at or below 2d within
    /// the step budget; the inputs violate the construction's hypotheses.
    #[error("sequence stalled: {0}")]
    ExhaustedChoices(String),
    /// A sub-procedure-2 output failed its irreducibility check, which means
    /// the supplied map is not an endomorphism compatible with the seed.
    #[error("transform of f_{0} is reducible; map and seed polynomial are inconsistent")]
    IrreducibilityViolation(usize),
    #[error("start node is not a vertex of the graph")]
    NodeNotFound,
    #[error("subfield degree {sub} does not divide the field degree {ext}")]
    SubfieldMismatch { sub: u32, ext: u32 },
    #[error("invalid input: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable variant name, printed by the CLI on failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::PrimeTooLarge(_) => "PrimeTooLarge",
            Error::ReducibleModulus(_) => "ReducibleModulus",
            Error::DegreeMismatch(_) => "DegreeMismatch",
            Error::ContextMismatch => "ContextMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::BothZero => "BothZero",
            Error::DegreeZero => "DegreeZero",
            Error::SplitRetriesExceeded(_) => "SplitRetriesExceeded",
            Error::InvalidMap(_) => "InvalidMap",
            Error::SingularCurve => "SingularCurve",
            Error::PointNotOnCurve => "PointNotOnCurve",
            Error::OrderMismatch => "OrderMismatch",
            Error::NotDivisible => "NotDivisible",
            Error::DegenerateAlpha(_) => "DegenerateAlpha",
            Error::NotInOrder { .. } => "NotInOrder",
            Error::ExhaustedChoices(_) => "ExhaustedChoices",
            Error::IrreducibilityViolation(_) => "IrreducibilityViolation",
            Error::NodeNotFound => "NodeNotFound",
            Error::SubfieldMismatch { .. } => "SubfieldMismatch",
            Error::InvalidData(_) => "InvalidData",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
