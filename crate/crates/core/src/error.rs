use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error(
        "eigenvalue and multiplicity lists differ in length ({eigenvalues} vs {multiplicities})"
    )]
    LengthMismatch {
        eigenvalues: usize,
        multiplicities: usize,
    },
    #[error("duplicate eigenvalue {0}")]
    DuplicateEigenvalue(f64),
    #[error("eigenvalue {0} is negative or not finite")]
    InvalidEigenvalue(f64),
    #[error("multiplicity at position {0} must be positive")]
    NonPositiveMultiplicity(usize),
    #[error("dimension {0} exceeds the supported maximum of 2^20")]
    DimensionTooLarge(usize),
    #[error("{what} out of range: {value} (supported {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("transposition requires two distinct indices, got {0} twice")]
    DegenerateTransposition(usize),
    #[error("Dirichlet parameter {0} must be positive and finite")]
    InvalidAlpha(f64),
    #[error("not a set partition of 0..{0}")]
    InvalidPartition(usize),
    #[error("not a probability vector: {0}")]
    InvalidSimplexPoint(String),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("exact moment needs {terms} terms, exceeding the budget of {budget}")]
    TermBudgetExceeded { terms: u128, budget: u64 },
    #[error("no complete MUB construction available for dimension {0}")]
    UnsupportedMubDimension(usize),
    #[error("need at least {needed} {what}, got {got}")]
    TooFewSamples {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("statistic undefined for a single eigenspace")]
    SingleEigenspace,
    #[error("invalid ensemble spec: {0}")]
    InvalidEnsemble(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
