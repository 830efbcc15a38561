use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: max |A - A*| = {residual:.3e} exceeds {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("level order violation: {0}")]
    LevelOrder(String),

    #[error("materialization budget exceeded: matrix dimension {dim} > budget {budget}")]
    Budget { dim: usize, budget: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("multiplicity search failed at level {level}: {reason}")]
    SearchFailure { level: usize, reason: String },

    #[error("Lipschitz class violation: measured L_f = {measured:.6} is not below gamma^i = {bound:.6}")]
    ClassViolation { measured: f64, bound: f64 },

    #[error("operation requires a reindexed system: {0}")]
    NotReindexed(String),

    #[error("oscillation bound violated: {0}")]
    Oscillation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension too large for exact machine indexing: {0}")]
    DimOverflow(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
