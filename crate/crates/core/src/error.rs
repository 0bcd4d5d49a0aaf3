use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid modulus {p}^{k}: {reason}")]
    InvalidModulus { p: u64, k: u32, reason: &'static str },

    #[error("{value} is not invertible modulo {p}^{k}")]
    NonInvertible { value: u64, p: u64, k: u32 },

    #[error("denominator {den} is divisible by p = {p}")]
    DenominatorDivisibleByP { den: u64, p: u64 },

    #[error("operands carry different moduli")]
    ModulusMismatch,

    #[error("value is not exactly divisible by {0}")]
    NotExact(String),

    #[error("Newton iteration did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("order {m} does not divide p - 1 = {p_minus_one}")]
    OrderNotDividing { m: u64, p_minus_one: u64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("term {n} of the truncated series is not p-integral")]
    TermNotPIntegral { n: u64 },

    #[error("conditions not met: {0}")]
    ConditionsNotMet(String),

    #[error("eta quotient offset {num}/24 is not an integer")]
    NonIntegralOffset { num: u64 },

    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("index {index} exceeds series order {order}")]
    OutOfRange { index: usize, order: usize },

    #[error("p = {0} is not congruent to 1 modulo 5")]
    NotOneModFive(u64),

    #[error("p = {0} is congruent to 1 modulo 5")]
    IsOneModFive(u64),

    #[error("p = 5 is excluded")]
    PIsFive,

    #[error("p = {p} exceeds the supported bound {limit} for this method")]
    TooLarge { p: u64, limit: u64 },

    #[error("ring element expected to be a p-adic integer is not: {0}")]
    NonIntegralResult(String),

    #[error("cache corrupt: {0}")]
    CacheCorrupt(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
