//! Two-level quantum dynamics in the su(2) coherence-vector picture.
//!
//! The state is the Bloch (coherence) vector G, driven by
//! dG/dt = g(t)·G with the antisymmetric generator built from the Rabi
//! frequency Ω(t) and detuning Δ(t). Solutions are available from an
//! adaptive reference integrator, first and third order Magnus
//! exponentials, a Wei-Norman product of exponentials and, for
//! proportional detuning, a closed-form rotation in the F-frame. The
//! phenomenological relaxation model and the threshold logic machines are
//! built on the same propagation layer.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar type.
//!
//! ```
//! use bloch_su2::{CoherenceVector64, DriveConfig64, DetuningLaw, integrate_reference};
//!
//! let drive = DriveConfig64::sin_squared_pulse(std::f64::consts::PI, 6.0, DetuningLaw::Constant(0.0)).unwrap();
//! let g = integrate_reference(&drive, &CoherenceVector64::ground(), 1e-10).unwrap().end();
//! assert!((g.g3 + 1.0).abs() < 1e-8);
//! ```

pub mod algebra;
pub mod cli;
pub mod dissipation;
pub mod drive;
pub mod error;
pub mod logic;
pub mod observables;
pub mod ode;
pub mod propagators;
pub mod quadrature;
pub mod scalar;
pub mod state;
pub mod weinorman;

pub use algebra::{adjoint_generator, generator, structure_constant, StructureConstants};
pub use dissipation::{dissipative_rhs, integrate_dissipative, relaxation_matrix, RelaxationRates};
pub use drive::{
    f_frame_coeffs, g_matrix, omega_at, pulse_area, DetuningLaw, DriveConfig, EnvelopeShape,
    FrameCoefficients, PulseEnvelope,
};
pub use error::{Error, Result};
pub use logic::{
    cnot_evaluate, default_gate_drive, parity_check, readout, Bit, LogicConfig, LogicResult,
    ParityMachineState,
};
pub use observables::{
    bloch_to_density, conservation_monitor, density_to_bloch, ConservationReport, DensityMatrix2,
};
pub use propagators::{
    f_frame_propagator, integrate_reference, magnus_propagator, magnus_terms, magnus_trajectory,
    reference_propagator, sylvester_exp, MagnusOrder, MagnusTerms, ReferenceSolution, Trajectory,
};
pub use scalar::Real;
pub use state::{CoherenceVector, Matrix3, Propagator3};
pub use weinorman::{consistency_residual, wn_propagator, wn_rhs, wn_solve, WeiNormanParams};

pub type CoherenceVector64 = CoherenceVector<f64>;
pub type CoherenceVector32 = CoherenceVector<f32>;
pub type Matrix3x64 = Matrix3<f64>;
pub type Matrix3x32 = Matrix3<f32>;
pub type Propagator64 = Propagator3<f64>;
pub type Propagator32 = Propagator3<f32>;
pub type DriveConfig64 = DriveConfig<f64>;
pub type DriveConfig32 = DriveConfig<f32>;
pub type MagnusTerms64 = MagnusTerms<f64>;
pub type MagnusTerms32 = MagnusTerms<f32>;
pub type DensityMatrix64 = DensityMatrix2<f64>;
pub type DensityMatrix32 = DensityMatrix2<f32>;
pub type RelaxationRates64 = RelaxationRates<f64>;
pub type RelaxationRates32 = RelaxationRates<f32>;
pub type WeiNormanParams64 = WeiNormanParams<f64>;
pub type WeiNormanParams32 = WeiNormanParams<f32>;
pub type LogicConfig64 = LogicConfig<f64>;
