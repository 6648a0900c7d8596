use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid of size {grid:?} aliases frequency {freq:?}; pass the aliased option to allow it")]
    Aliasing { grid: Vec<usize>, freq: Vec<i64> },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("regime guard violated: {0}")]
    Guard(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("residual is numerically zero; no atom has a nonzero score")]
    ZeroResidual,

    #[error("Chebyshev projection did not converge after {iterations} iterations (optimality gap {gap:e})")]
    ProjectionNotConverged { iterations: usize, gap: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("schedule too tight at step {step}: F(phi - f) = {value:e} < -eps = {bound:e}")]
    ScheduleTooTight { step: usize, value: f64, bound: f64 },

    #[error("oracle intractable: {0}")]
    OracleBudget(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("missing weights on knot set")]
    MissingWeights,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_step(step: usize, source: Error) -> Self {
        Error::AtStep {
            step,
            source: Box::new(source),
        }
    }
}
