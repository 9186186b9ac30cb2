use thiserror::Error;

/// Errors raised by the simulation library.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type used
/// for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("t = {t} lies outside the sampled envelope domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },

    #[error("frame coefficients undefined: Omega and Delta are both zero")]
    DegenerateFrame,

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({steps}) exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, steps: usize },

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("Wei-Norman parameterization singular at t = {t} (cos Y2 = {cos_y2:e})")]
    GimbalSingularity { t: f64, cos_y2: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unphysical coherence vector: norm {norm} exceeds 1")]
    UnphysicalState { norm: f64 },

    #[error(
        "gate failure (pulse {pulse}, initial {initial}): rho00 = {rho00}, rho11 = {rho11}, coherence = {coherence}"
    )]
    GateFailure {
        pulse: u8,
        initial: u8,
        rho00: f64,
        rho11: f64,
        coherence: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
