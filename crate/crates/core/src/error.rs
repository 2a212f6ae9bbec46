use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The phase system did not reach its fixed point.
    #[error("phase fixed point did not converge after {sweeps} sweeps (last residual {residual:e})")]
    PhaseNonConvergence { sweeps: usize, residual: f64 },

    /// Successive Picard differences stopped shrinking.
    #[error("Picard iteration is not contracting (ratios {ratios:?}); try a smaller final time")]
    NonContraction { ratios: Vec<f64> },

    /// A retained denominator of the explicit trilinear form vanished.
    #[error("zero denominator at triple ({0}, {1}, {2}); K0 is too small for this profile")]
    ZeroDenominator(i64, i64, i64),

    #[error("reference integrator became unstable at step {step}")]
    Instability { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `true` for errors caused by a malformed request rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_) | Error::Domain(_) | Error::GridMismatch(_) | Error::Config(_)
        )
    }
}
