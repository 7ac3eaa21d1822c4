//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinitePoint { index: usize },

    #[error("point outside the domain of `{function}`")]
    OutsideDomain { function: String },

    #[error("invalid function spec: {0}")]
    InvalidFunction(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate pair at index {index}: separation {separation:e} is below {min_separation:e}")]
    DegeneratePair {
        index: usize,
        separation: f64,
        min_separation: f64,
    },

    #[error("sphere of radius {t} around the anchor has no feasible point in the domain")]
    SphereOutsideDomain { t: f64 },

    #[error("no feasible pair at distance {t} found in the region")]
    NoFeasiblePair { t: f64 },

    #[error("sampler failed on set `{set}` after {attempts} attempts")]
    SamplerFailure { set: String, attempts: usize },

    #[error("point does not belong to any set of the system")]
    NotInSystem,

    #[error("point not in set {set_index} (signed distance {signed_distance:e})")]
    NotInSet {
        set_index: usize,
        signed_distance: f64,
    },

    #[error("orbit left set {set_index} at stage {stage} (signed distance {signed_distance:e})")]
    OrbitEscape {
        stage: usize,
        set_index: usize,
        signed_distance: f64,
    },

    #[error("point listed as fixed is not: residual {residual:e} exceeds {tol:e}")]
    NotFixed { residual: f64, tol: f64 },

    #[error("assumption not established: {0}")]
    AssumptionViolation(String),

    #[error("no feasible evaluation within the budget")]
    BudgetExhaustedEarly,

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error at `{path}`: {message}")]
    ConfigSemantic { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
