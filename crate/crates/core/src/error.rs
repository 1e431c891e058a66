use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n_levels must be odd and at least 3 (got {0})")]
    InvalidLevelCount(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("level index {index} out of range 1..={n_levels}")]
    IndexOutOfRange { index: usize, n_levels: usize },

    #[error("hamiltonian is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("invalid decay channel {source_state} -> {target}: {reason}")]
    InvalidDecay {
        source_state: usize,
        target: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("steady state is not unique: estimated null-space dimension {null_dim}")]
    DegenerateSteadyState { null_dim: usize },

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("integrator step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integrator tolerance not met: {0}")]
    ToleranceNotMet(String),

    #[error("closed forms are only available for n_levels 3, 5 or 7 (got {0})")]
    UnsupportedLevelCount(usize),

    #[error("photon order n = {n} is not supported: {reason}")]
    UnsupportedOrder { n: usize, reason: String },

    #[error("fundamental peak weight is zero: the system is not driven")]
    ZeroFundamental,

    #[error("log-linear fit needs at least 3 nonzero peaks (got {0})")]
    TooFewPeaks(usize),

    #[error("frequency grid is empty")]
    EmptyGrid,

    #[error("invalid angular momentum quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("invalid drive configuration: {0}")]
    InvalidDrives(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a failing solver.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::DegenerateSteadyState { .. }
                | Error::ResidualTooLarge { .. }
                | Error::StepUnderflow { .. }
                | Error::ToleranceNotMet(_)
                | Error::InvalidDensityMatrix(_)
                | Error::ZeroFundamental
                | Error::TooFewPeaks(_)
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
