use thiserror::Error;

/// Errors raised by the numerical kernels and physics models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy loss in {routine}: {detail}")]
    AccuracyLoss {
        routine: &'static str,
        detail: String,
    },

    #[error("series did not converge by order {max_order} (rho = {rho})")]
    NonConvergence { max_order: usize, rho: f64 },

    #[error("near-singular multipole denominator at order {ell} (|D| = {magnitude:e})")]
    DegenerateDenominator { ell: usize, magnitude: f64 },

    #[error("cluster radius {radius:e} m is not smaller than the grating period {period:e} m")]
    Geometry { radius: f64, period: f64 },

    #[error("target {target} is not reachable: {reason}")]
    Unachievable { target: f64, reason: String },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
