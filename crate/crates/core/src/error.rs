use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tolerance must be a positive finite number, got {0}")]
    InvalidTolerance(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not a projector (‖P−P†‖ = {hermiticity:.3e}, ‖P²−P‖ = {idempotency:.3e})")]
    NotAProjector { hermiticity: f64, idempotency: f64 },
    #[error("state vector is not normalised (norm {0})")]
    NotNormalized(f64),
    #[error("non-finite entries")]
    NonFinite,
    #[error("empty input to {0}")]
    EmptyInput(&'static str),
    #[error("outcome tuple length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("outcome entries must be +1 or -1")]
    InvalidSign,
    #[error("question ({x}, {y}) out of range for a {m}x{n} game")]
    QuestionOutOfRange { x: usize, y: usize, m: usize, n: usize },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("{m}x{n} is too large for exhaustive enumeration ({count} candidate strategies)")]
    TooLarge { m: usize, n: usize, count: f64 },
    #[error("invalid operator pool: {0}")]
    InvalidPool(String),
    #[error("observable constraint violated at cell ({row}, {col}): {what}")]
    ConstraintViolation {
        row: usize,
        col: usize,
        what: String,
    },
    #[error("reduction rejected: {0}")]
    RuleViolation(crate::setup::Restriction),
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("state is not a perfect solution of this setup (distance {distance:.3e})")]
    NotAPqss { distance: f64 },
    #[error("malformed scenario: {0}")]
    MalformedScenario(String),
    #[error("realization failure: {0}")]
    RealizationFailure(String),
    #[error("input {index} is not a perfect strategy (value {value})")]
    NotPerfectInput { index: usize, value: f64 },
    #[error("integration inputs play different games")]
    GameMismatch,
    #[error("matrix is not unitary (‖U†U − I‖ = {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid integration plan: {0}")]
    InvalidPlan(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
