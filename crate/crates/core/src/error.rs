use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent {value} at position {position}: exponents must be finite and >= 1")]
    InvalidExponent { position: usize, value: f64 },

    #[error("periodic tail pattern must be nonempty")]
    EmptyPattern,

    #[error("index {0} is not a positive integer")]
    InvalidIndex(usize),

    #[error("non-finite entry at index {0}")]
    NonFiniteEntry(usize),

    #[error("overflow evaluating |a_{index}|^{exponent}")]
    Overflow { index: usize, exponent: f64 },

    #[error("norm solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("images T{{{first}}} and T{{{second}}} both contain {index}")]
    DisjointnessViolation {
        first: usize,
        second: usize,
        index: usize,
    },

    #[error("image T{{{0}}} is empty")]
    EmptyImage(usize),

    #[error("index {index} outside domain 1..={bound}")]
    OutOfDomain { index: usize, bound: usize },

    #[error("column {column} maps to index {index} beyond truncation {bound}")]
    TruncationBreach {
        column: usize,
        index: usize,
        bound: usize,
    },

    #[error("multiplier value at {index} has modulus {modulus} > 1")]
    MultiplierTooLarge { index: usize, modulus: f64 },

    #[error("multiplier is nonzero at {0}, outside the range of the set isomorphism")]
    MultiplierOffRange(usize),

    #[error("map is not injective: {first} and {second} both map to {image}")]
    NotInjective {
        first: usize,
        second: usize,
        image: usize,
    },

    #[error("permutation table is not a bijection of 1..={0}")]
    NotBijective(usize),

    #[error("columns {first} and {second} share support index {index}")]
    SupportOverlap {
        first: usize,
        second: usize,
        index: usize,
    },

    #[error("column {0} is zero")]
    EmptyColumn(usize),

    #[error("exponent sequence is in the mixed regime; all exponents must lie in [1,2) or all in (2,inf)")]
    RegimeViolation,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("generator could not place column {0}: no free index with a matching exponent")]
    GeneratorExhausted(usize),
}
