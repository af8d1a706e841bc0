use thiserror::Error;

/// Every failure the library can report. `code()` gives the stable
/// upper-case identifier used in JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("precision must be at least 1")]
    BadPrecision,
    #[error("division by zero")]
    DivByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("argument is not a p-adic unit")]
    NotAUnit,
    #[error("logarithm of zero")]
    ZeroInput,
    #[error("not a quadratic residue modulo p")]
    NonResidue,
    #[error("height bound too large for the available precision")]
    HeightTooLarge,
    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("illegal exponent: {0}")]
    IllegalExponent(String),
    #[error("fractional exponent on a torsion component")]
    FractionalTorsion,
    #[error("p-adic exponent applied to a non-principal unit")]
    PadicExponentOnNonunit,
    #[error("operands use different generator lists")]
    GeneratorMismatch,
    #[error("valuation matrix is not invertible")]
    SingularOrd,
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Frobenius matrix is singular")]
    SingularPhi,
    #[error("filtration shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("declared facts do not determine the rational dimension: {0}")]
    InsufficientFacts(String),
    #[error("bad period: {0}")]
    BadPeriod(String),
    #[error("vector is not isotropic")]
    NotIsotropic,
    #[error("vector pairs trivially with N^2(c)")]
    DegenerateAPairing,
    #[error("vector is not normalised (c-coordinate must be 1)")]
    NotNormalized,
    #[error("gamma reconstructs as the rational {0}")]
    GammaRational(String),
    #[error("L-invariant equality undecided")]
    Undecided,
    #[error("prime constraint violated: {0}")]
    PrimeConstraint(String),
    #[error("ell must differ from p")]
    SamePrime,
    #[error("operands live over different primes")]
    PrimeMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EvenPrime => "EVEN_PRIME",
            Error::NotPrime(_) => "NOT_PRIME",
            Error::BadPrecision => "BAD_PRECISION",
            Error::DivByZero => "DIV_BY_ZERO",
            Error::PrecisionExhausted(_) => "PRECISION_EXHAUSTED",
            Error::NotAUnit => "NOT_A_UNIT",
            Error::ZeroInput => "ZERO_INPUT",
            Error::NonResidue => "NON_RESIDUE",
            Error::HeightTooLarge => "HEIGHT_TOO_LARGE",
            Error::ParseError { .. } => "PARSE_ERROR",
            Error::IllegalExponent(_) => "ILLEGAL_EXPONENT",
            Error::FractionalTorsion => "FRACTIONAL_TORSION",
            Error::PadicExponentOnNonunit => "PADIC_EXPONENT_ON_NONUNIT",
            Error::GeneratorMismatch => "GENERATOR_MISMATCH",
            Error::SingularOrd => "SINGULAR_ORD",
            Error::NotUnimodular => "NOT_UNIMODULAR",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::SingularPhi => "SINGULAR_PHI",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::InsufficientFacts(_) => "INSUFFICIENT_FACTS",
            Error::BadPeriod(_) => "BAD_PERIOD",
            Error::NotIsotropic => "NOT_ISOTROPIC",
            Error::DegenerateAPairing => "DEGENERATE_A_PAIRING",
            Error::NotNormalized => "NOT_NORMALIZED",
            Error::GammaRational(_) => "GAMMA_RATIONAL",
            Error::Undecided => "UNDECIDED",
            Error::PrimeConstraint(_) => "PRIME_CONSTRAINT",
            Error::SamePrime => "SAME_PRIME",
            Error::PrimeMismatch => "PRIME_MISMATCH",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
