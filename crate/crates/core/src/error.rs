use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: need D < 0 and D = 0, 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("forms have different discriminants ({0} and {1})")]
    DiscriminantMismatch(i64, i64),
    #[error("prime {p} divides the conductor of {d}")]
    PrimeDividesConductor { d: i64, p: u64 },
    #[error("prime {p} splits in the field of discriminant {d}")]
    PrimeSplits { d: i64, p: u64 },
    #[error("({d}, {p}) is outside the hypotheses: {reason}")]
    Hypothesis { d: i64, p: u64, reason: &'static str },
    #[error("case not covered by the residue lists: {0}")]
    NotCovered(String),
    #[error("coefficients of H_{0} failed to stabilise after {1} precision doublings")]
    RoundingUnstable(i64, u32),
    #[error("q-series failed to converge at {0} bits")]
    NonConvergence(u64),
    #[error("odd valuation {v} of disc(H_{d}) at {p}")]
    OddValuation { d: i64, p: u64, v: u32 },
    #[error("prediction not applicable to ({d}, {p}): {reason}")]
    NotApplicable { d: i64, p: u64, reason: String },
    #[error("out of range for the multiplicity taxonomy: {0}")]
    OutOfRange(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDiscriminant(_) => "invalid_discriminant",
            Error::NotPrime(_) => "not_prime",
            Error::ZeroValuation => "zero_valuation",
            Error::DiscriminantMismatch(..) => "discriminant_mismatch",
            Error::PrimeDividesConductor { .. } => "prime_divides_conductor",
            Error::PrimeSplits { .. } => "prime_splits",
            Error::Hypothesis { .. } => "hypothesis",
            Error::NotCovered(_) => "not_covered",
            Error::RoundingUnstable(..) => "rounding_unstable",
            Error::NonConvergence(_) => "non_convergence",
            Error::OddValuation { .. } => "odd_valuation",
            Error::NotApplicable { .. } => "not_applicable",
            Error::OutOfRange(_) => "out_of_range",
            Error::InvalidParameters(_) => "invalid_parameters",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
