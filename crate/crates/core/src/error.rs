use thiserror::Error;

/// Failures raised by the level-system, propagation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate denominator: |Omega1|^2 + |E1|^2 = {0:e}")]
    DegenerateDenominator(f64),

    #[error("eigensolver did not converge (residual {residual:e} > bound {bound:e})")]
    ConvergenceFailure { residual: f64, bound: f64 },

    #[error("ambiguous eigenbranch: top overlaps {first:.9} and {second:.9} are not separated")]
    AmbiguousBranch { first: f64, second: f64 },

    #[error("step size underflow at zeta = {zeta} (h = {step:e})")]
    StepSizeUnderflow { zeta: f64, step: f64 },

    #[error("no conversion cycle found: |E1|^2 is monotone over the trajectory")]
    NoCycleFound,

    #[error("relative phase undefined: field amplitude {0:e} below threshold")]
    UndefinedPhase(f64),

    #[error("phase singularity: 1 + cos(phi0) = {0:e}, conversion length diverges")]
    PhaseSingularity(f64),

    #[error("outside validity region: {0}")]
    OutOfValidityRegion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag, used in CSV flags and CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateDenominator(_) => "degenerate_denominator",
            Error::ConvergenceFailure { .. } => "convergence_failure",
            Error::AmbiguousBranch { .. } => "ambiguous_branch",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::NoCycleFound => "no_cycle_found",
            Error::UndefinedPhase(_) => "undefined_phase",
            Error::PhaseSingularity(_) => "phase_singularity",
            Error::OutOfValidityRegion(_) => "out_of_validity_region",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
        }
    }
}
