use thiserror::Error;

/// Errors produced by construction, evaluation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("idempotence check failed: max |P^2 - P| = {defect:.3e} exceeds {tol:.1e}")]
    NotIdempotent { defect: f64, tol: f64 },

    #[error("projector spectrum is not clustered at {{0,1}}: eigenvalue {value:.6e} is {defect:.3e} away")]
    BadSpectrum { value: f64, defect: f64 },

    #[error("singular Gram system: cond(B B^t) ~ {cond:.3e} exceeds {limit:.1e}")]
    SingularGram { cond: f64, limit: f64 },

    #[error("domain error on variable {variable}: {message}")]
    Domain { variable: usize, message: String },

    #[error("ordering weights sum to {sum:.12e}, expected 1 within 1e-12")]
    BadOrderingWeights { sum: f64 },

    #[error("ordering guard exceeded: {factors} factors > {max} (factorial growth)")]
    OrderingGuard { factors: usize, max: usize },

    #[error("trajectory diverged at step {step} (t = {time}): state entry non-finite or above {guard:.1e}")]
    Divergence { step: usize, time: f64, guard: f64 },

    #[error("not a fixed point: residual {residual:.3e} exceeds {tol:.1e}")]
    NotFixedPoint { residual: f64, tol: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
