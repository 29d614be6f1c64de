use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-physical parameters: {0}")]
    NonPhysical(String),

    #[error("squeezing transformation diverges: |K_d / detuning| = {ratio} must be < 1")]
    EnhancementDivergence { ratio: f64 },

    #[error("dipole field requested at the dipole position")]
    ZeroPosition,

    #[error("quadrature did not converge: estimated relative error {achieved:e} (requested {requested:e})")]
    QuadratureNonConvergent { achieved: f64, requested: f64 },

    #[error("Hilbert space dimension {dim} exceeds the dense limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem {0} is not present in this state")]
    MissingSubsystem(&'static str),

    #[error("empty subsystem selection")]
    EmptySelection,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("time grid must be non-empty and strictly increasing")]
    InvalidTimeGrid,

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t:e}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("Hermitian eigensolver did not converge (dimension {dim})")]
    EigenNoConvergence { dim: usize },

    #[error("invariant violated at t = {t:e}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("closed-form reduced state is unphysical at t = {t:e}: delta^2 = {delta_sq:e}")]
    UnphysicalSeries { t: f64, delta_sq: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergent { .. }
                | Error::StepSizeUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::InvariantViolation { .. }
                | Error::EigenNoConvergence { .. }
                | Error::UnphysicalSeries { .. }
        )
    }
}
