use thiserror::Error;

/// Errors raised by the numerical and physical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate_re}{estimate_im:+}i, achieved bound {bound:e}")]
    NonConvergence {
        lower: f64,
        upper: f64,
        estimate_re: f64,
        estimate_im: f64,
        bound: f64,
    },

    #[error("oscillatory tail did not converge beyond omega = {start}: partial value {partial_re}{partial_im:+}i, tail estimate {tail_estimate:e}")]
    TailNonConvergence {
        start: f64,
        partial_re: f64,
        partial_im: f64,
        tail_estimate: f64,
    },

    #[error("cavity loop denominator vanishes at omega = {omega} (|d| = {modulus:e})")]
    ResonanceSingularity { omega: f64, modulus: f64 },

    #[error("susceptibility diverges at omega = {omega}: perfect reflection on resonance")]
    Divergence { omega: f64 },

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("reality condition violated: residual {residual:e} exceeds {tolerance:e}")]
    RealityViolation { residual: f64, tolerance: f64 },

    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    #[error("mirror model '{0}' is non-causal and requires an explicit diagnostic override")]
    NonCausalModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mirror table: {0}")]
    InvalidTable(String),
}

impl Error {
    /// True for failures of the numerical machinery as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::TailNonConvergence { .. }
                | Error::ResonanceSingularity { .. }
                | Error::Divergence { .. }
                | Error::RealityViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
