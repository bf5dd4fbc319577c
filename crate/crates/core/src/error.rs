use thiserror::Error;

/// Failures raised by the distribution, conditioning, and construction routines.
///
/// Indices carried by the variants are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entry {index} is negative")]
    NegativeEntry { index: usize },
    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("every entry is zero")]
    AllZero,
    #[error("parameter {value} is outside {expected}")]
    OutOfRange { value: String, expected: &'static str },
    #[error("need at least {min} coordinates, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("prior assigns zero mass to index {index}")]
    ZeroPrior { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{weights} block weights supplied for {blocks} blocks")]
    WeightCountMismatch { weights: usize, blocks: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("brute-force enumeration supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("horizon {horizon} exceeds the {available} available coordinates")]
    HorizonTooLarge { horizon: usize, available: usize },
    #[error("horizon insufficient: {0}")]
    HorizonInsufficient(String),
    #[error("second coordinate is zero")]
    DegenerateSecondCoordinate,
    #[error("shift {delta} must lie strictly between 0 and {limit}")]
    DeltaTooLarge { delta: String, limit: String },
    #[error("epsilon {epsilon} must satisfy {expected}")]
    InvalidEpsilon { epsilon: String, expected: String },
    #[error("no admissible value found after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("distribution is not a blind-spot member at horizon {horizon}")]
    NotInBlindSpot { horizon: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
