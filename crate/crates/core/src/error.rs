use thiserror::Error;

/// Errors raised by the numerical kernels and the physics modules built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },

    /// The ODE solution left the configured ceiling; the singular time lies in `bracket`.
    #[error("solution blows up inside t in [{:.6e}, {:.6e}]", .bracket.0, .bracket.1)]
    BlowUp { bracket: (f64, f64) },

    /// A requested time lies at or beyond a detected singularity.
    #[error("requested t = {t} lies beyond the singularity bracket [{:.6e}, {:.6e}]", .bracket.0, .bracket.1)]
    Singularity { t: f64, bracket: (f64, f64) },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    /// The state does not vanish at the momentum cut-off.
    #[error("state violates the physical domain: |psi(+-p0)| = {amplitude:e}")]
    DomainViolation { amplitude: f64 },

    /// Inversion requested at (or beyond) the band edge where 1/cos diverges.
    #[error("q = {q} is not strictly inside the band |q| < {limit} (q0 = {q0})")]
    EndpointSingularity { q: f64, limit: f64, q0: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("wavenumber k = {k} exceeds the bound k_max = {k_max}")]
    WavenumberBound { k: f64, k_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}
