use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "open loop: closure residual |alpha(T)| = {residual:e} exceeds tolerance {tolerance:e}"
    )]
    OpenLoop { residual: f64, tolerance: f64 },

    #[error("propagator is not unitary: max|U'U - 1| = {residual:e} (tolerance {tolerance:e})")]
    NonUnitaryResult { residual: f64, tolerance: f64 },

    #[error("cavity did not return to vacuum on branch {branch}: |<kl,0|U|kl,0>| = {overlap}")]
    CavityNotReturned { branch: &'static str, overlap: f64 },

    #[error("phase relation violated on branch {branch}: {detail}")]
    RelationViolated {
        branch: &'static str,
        detail: String,
    },

    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),

    #[error("time step too coarse: dt*r0 = {product} must stay below {limit}")]
    StepTooCoarse { product: f64, limit: f64 },

    #[error("Fock dimension {dim} is below the required {required} for this pulse")]
    DimensionTooSmall { dim: usize, required: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

/// Non-fatal diagnostics attached to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `|alpha|²` exceeds `dim/4`; the truncated operator is unreliable.
    Truncation { alpha_sq: f64, dim: usize },
    /// The requested phase is a multiple of 2π, so the gate is the identity.
    TrivialTarget { gamma: f64 },
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::Truncation { alpha_sq, dim } => {
                write!(
                    f,
                    "truncation: |alpha|^2 = {alpha_sq} exceeds dim/4 = {}",
                    *dim as f64 / 4.0
                )
            }
            Warning::TrivialTarget { gamma } => {
                write!(f, "trivial target: gamma = {gamma} is a multiple of 2*pi, the gate is the identity")
            }
        }
    }
}

/// A value together with any warnings raised while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Warned<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Warned<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn into_value(self) -> T {
        self.value
    }

    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }
}
