use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("{0} is not a prime power")]
    NotPrimePower(String),

    #[error("modulus {0} is out of range for the prime field backend (need p < 2^63)")]
    ModulusOutOfRange(String),

    #[error("curve y^2 = x^3 + {a}x + {b} is singular over F_{p}")]
    Singular { p: u64, a: String, b: String },

    #[error("supersingular input: characteristic {p} divides the trace {t}")]
    Supersingular { p: String, t: String },

    #[error("trace {t} does not give an imaginary quadratic Frobenius for q = {q}")]
    NotImaginary { q: String, t: String },

    #[error("point counts differ: {0} vs {1}")]
    CountMismatch(String, String),

    #[error("curves are defined over different fields: F_{0} vs F_{1}")]
    FieldMismatch(u64, u64),

    #[error("field of size {size} exceeds the enumeration bound {bound}")]
    Capacity { size: String, bound: u64 },

    #[error("conductor {g} does not divide b = {b}")]
    ConductorNotDividing { g: BigInt, b: BigInt },

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("p-adic valuation of zero is infinite")]
    ZeroValuation,

    #[error("{0} is not invertible")]
    NotInvertible(String),

    #[error("division by the zero polynomial")]
    ZeroPolynomial,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
