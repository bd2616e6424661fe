use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("effective density is singular at zero frequency")]
    Singular,

    #[error("integral diverges at endpoint {endpoint}")]
    Divergence { endpoint: f64 },

    #[error("quadrature did not converge (error {achieved:e}, requested {requested:e})")]
    NoConvergence { achieved: f64, requested: f64 },

    #[error("operation not supported for {0}")]
    UnsupportedVariant(&'static str),

    #[error("spectral moment η[{k}] is not finite: {reason}")]
    UnsupportedSpectrum { k: i32, reason: String },

    #[error("degenerate scheme: N0 vanishes")]
    DegenerateScheme,

    #[error("phase undefined: both arctangent arguments vanish")]
    UndefinedPhase,

    #[error("outside admissible domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("oracle consistency check failed: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Divergence { .. } | Error::UnsupportedSpectrum { .. })
    }
}
