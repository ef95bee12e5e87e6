//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("group element is not invertible over the working ring")]
    NonInvertibleElement,
    #[error("rejection sampling exhausted after {0} attempts")]
    SamplingExhausted(u32),
    #[error("operation not defined for space `{0}`")]
    WrongSpace(&'static str),
    #[error("point lies on the boundary (invariant vanishes)")]
    BoundaryPoint,
    #[error("classification requires coordinates over a field (F_p or Q)")]
    FieldRequired,
    #[error("torus parameters violate the row constraint: {0}")]
    ConstraintViolated(String),
    #[error("no tabulated torus character for orbit row `{0}`")]
    UnsupportedRow(String),
    #[error("point has wrong dimension: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no rational function of the requested degrees fits the data")]
    NoFit,
    #[error("need at least {needed} coefficients, got {got}")]
    InsufficientCoefficients { needed: usize, got: usize },
    #[error("reconstruction fails holdout validation at coefficient m = {m}")]
    HoldoutMismatch { m: usize },
    #[error("denominator vanishes at t = 0")]
    DenominatorVanishesAtOrigin,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("enumeration volume {needed} exceeds the point budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("monte carlo census needs a positive sample count")]
    EmptySample,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p^k = {0} exceeds the supported coordinate range")]
    PrecisionOverflow(String),

    #[error("test function is empty or has vanishing primal zeta")]
    EmptyTestFunction,
    #[error("gamma factors disagree across test functions: residual {residual:.3e}")]
    InconsistentGamma { residual: f64 },
    #[error("primal integral matrix is numerically rank deficient")]
    RankDeficient,
    #[error("no test function yields an exactly reconstructed gamma")]
    NoExactGamma,

    #[error("Re(s) = {s} is outside the configured convergent range (> {min})")]
    ConvergenceRangeViolated { s: f64, min: f64 },
    #[error("quadrature exceeded max_evals = {0}")]
    MaxEvalsExceeded(u64),

    #[error("census file checksum mismatch (file edited or corrupted)")]
    ChecksumMismatch,
    #[error("unsupported census schema version {0} (expected 1)")]
    UnsupportedSchema(u32),
    #[error("malformed census file: {0}")]
    MalformedCensus(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
