use thiserror::Error;

/// Errors produced by `qsd-core`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("too many Lindblad operators for dimension {dim}: {count} > {max}")]
    TooManyChannels {
        dim: usize,
        count: usize,
        max: usize,
    },

    #[error("coupling `{name}` must be non-negative and finite, got {value}")]
    InvalidCoupling { name: &'static str, value: f64 },

    #[error("missing coupling `{0}`")]
    MissingCoupling(&'static str),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("integration diverged at t = {time}: {reason}")]
    IntegrationDiverged { time: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step {step} failed: norm underflow ({norm:e})")]
    StepFailure { step: usize, norm: f64 },

    #[error("{} of {total} trajectories failed (streams {failed:?}): {first}", failed.len())]
    EnsembleFailed {
        total: usize,
        failed: Vec<u64>,
        first: Box<Error>,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "no sign change of the maximal curvature on [{lo}, {hi}] (values {value_lo}, {value_hi})"
    )]
    NoSignChange {
        lo: f64,
        hi: f64,
        value_lo: f64,
        value_hi: f64,
    },

    #[error("ill-posed experiment: {0}")]
    IllPosed(String),

    #[error("evaluation failed at grid node (theta {i_theta}, phi {i_phi}): {source}")]
    AtNode {
        i_theta: usize,
        i_phi: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
