use thiserror::Error;

/// Errors raised across the crate.
///
/// `Hypothesis` marks inputs that are well formed but fall outside the
/// arithmetic conditions an operation needs; the CLI maps it to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{base} is not a primitive root mod {modulus}")]
    NotGenerator { base: u64, modulus: u64 },
    #[error("target is divisible by the modulus {0}")]
    ZeroTarget(u64),
    #[error("p-adic operands over different primes ({0} and {1})")]
    MixedPrimes(u64, u64),
    #[error("{ell} is not a 1-unit mod {p}")]
    NotOneUnit { ell: u64, p: u64 },
    #[error("hypothesis rejected: {0}")]
    Hypothesis(String),
    #[error("conic has no rational point: {0}")]
    Insoluble(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by arithmetic hypotheses rather than malformed input.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis(_)
                | Error::NotOneUnit { .. }
                | Error::Precondition(_)
                | Error::Insoluble(_)
                | Error::NotImplemented(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
