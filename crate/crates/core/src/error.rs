use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("dense oracle dimension {dim} exceeds cap {cap}")]
    OracleTooLarge { dim: usize, cap: usize },

    #[error("tridiagonal block is empty")]
    EmptyBlock,

    #[error("tridiagonal block is reducible: off-diagonal {index} is {value}")]
    ReducibleBlock { index: usize, value: f64 },

    #[error("inverse iteration did not converge (residual {residual:e} after {attempts} attempts)")]
    NoConvergence { residual: f64, attempts: usize },

    #[error("ground energy for manifold {0} is missing")]
    MissingNeighbor(u64),

    #[error("coefficient vector invalid: {0}")]
    InvalidState(String),

    #[error("sweep is empty")]
    EmptySweep,

    #[error("sweep is not sorted by excitation density at index {0}")]
    UnsortedSweep(usize),

    #[error("theta = {0} outside [0, pi]")]
    ThetaDomain(f64),

    #[error("target density {0} outside the admissible range")]
    TargetDomain(f64),

    #[error("could not bracket the chemical potential for target density {0}")]
    NoBracket(f64),

    #[error("density constraint unsatisfied: residual {residual:e} at target {target}")]
    ConstraintUnsatisfied { target: f64, residual: f64 },
}

impl Error {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::NoBracket(_) | Error::ConstraintUnsatisfied { .. }
        )
    }
}
