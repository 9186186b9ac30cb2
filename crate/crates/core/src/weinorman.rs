//! Wei-Norman factorization M(t) = exp(Υ₁𝓕₁)·exp(Υ₂𝓕₂)·exp(Υ₃𝓕₃).
//!
//! Matching dM/dt·M⁻¹ = Ω𝓕₁ − Δ𝓕₃ gives the linear system
//!
//! ```text
//! [1     0          sin Υ₂      ] [Υ̇₁]   [ Ω]
//! [0   cos Υ₁   −cos Υ₂ sin Υ₁  ] [Υ̇₂] = [ 0]
//! [0   sin Υ₁    cos Υ₁ cos Υ₂  ] [Υ̇₃]   [−Δ]
//! ```
//!
//! whose determinant is cos Υ₂. It is inverted in closed form.

use serde::{Deserialize, Serialize};

use crate::algebra::adjoint_generator;
use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions};
use crate::propagators::sylvester_exp;
use crate::scalar::Real;
use crate::state::{Matrix3, Propagator3};

/// Smallest admissible |cos Υ₂|.
pub const SINGULAR_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WeiNormanParams<T> {
    pub y1: T,
    pub y2: T,
    pub y3: T,
}

impl<T: Real> WeiNormanParams<T> {
    pub fn new(y1: T, y2: T, y3: T) -> Self {
        Self { y1, y2, y3 }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.y1, self.y2, self.y3]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// The coefficient matrix W(Υ) of the parameter equations.
pub fn wn_matrix<T: Real>(y: &WeiNormanParams<T>) -> Matrix3<T> {
    let (s1, c1) = y.y1.sin_cos();
    let (s2, c2) = y.y2.sin_cos();
    let (o, l) = (T::zero(), T::one());
    Matrix3::new([[l, o, s2], [o, c1, -c2 * s1], [o, s1, c1 * c2]])
}

/// Υ̇ = W(Υ)⁻¹ (Ω, 0, −Δ)ᵀ:
/// Υ̇₃ = −Δ cos Υ₁ / cos Υ₂, Υ̇₂ = −Δ sin Υ₁ (= Υ̇₃ cos Υ₂ tan Υ₁),
/// Υ̇₁ = Ω − Υ̇₃ sin Υ₂.
///
/// The singularity error reports `t = NaN`; [`wn_solve`] fills in the time.
pub fn wn_rhs<T: Real>(y: &WeiNormanParams<T>, omega: T, delta: T) -> Result<[T; 3]> {
    let (s1, c1) = y.y1.sin_cos();
    let (s2, c2) = y.y2.sin_cos();
    if c2.abs() <= T::lit(SINGULAR_THRESHOLD) {
        return Err(Error::GimbalSingularity {
            t: f64::NAN,
            cos_y2: c2.as_f64(),
        });
    }
    let d3 = -delta * c1 / c2;
    let d2 = -delta * s1;
    let d1 = omega - d3 * s2;
    Ok([d1, d2, d3])
}

/// |√(Υ̇₂² + Υ̇₃² cos²Υ₂) − |Δ||, evaluated from the parameter equations.
pub fn consistency_residual<T: Real>(y: &WeiNormanParams<T>, omega: T, delta: T) -> Result<T> {
    let d = wn_rhs(y, omega, delta)?;
    let c2 = y.y2.cos();
    Ok(((d[1] * d[1] + d[2] * d[2] * c2 * c2).sqrt() - delta.abs()).abs())
}

pub type WeiNormanTrajectory<T> = Vec<(T, WeiNormanParams<T>)>;

/// A solve stopped at the singularity; `partial` holds the samples that were
/// reached before it.
#[derive(Debug, Clone, PartialEq)]
pub struct WnSolveError<T> {
    pub partial: WeiNormanTrajectory<T>,
    pub error: Error,
}

impl<T> From<WnSolveError<T>> for Error {
    fn from(e: WnSolveError<T>) -> Self {
        e.error
    }
}

impl<T> From<Error> for WnSolveError<T> {
    fn from(error: Error) -> Self {
        Self {
            partial: Vec::new(),
            error,
        }
    }
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::GimbalSingularity { cos_y2, .. } => Error::GimbalSingularity { t, cos_y2 },
        other => other,
    }
}

/// Integrates the parameter equations from Υ(t₀) = 0 and samples the dense
/// solution at `t_grid` (each within the drive window, non-decreasing).
///
/// A step across cos Υ₂ = 0 is treated like reaching the threshold.
pub fn wn_solve<T: Real>(
    cfg: &DriveConfig<T>,
    t_grid: &[T],
    tol: T,
) -> std::result::Result<WeiNormanTrajectory<T>, WnSolveError<T>> {
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be non-decreasing".into()).into());
    }
    if let (Some(&first), Some(&last)) = (t_grid.first(), t_grid.last()) {
        if first < cfg.t0 || last > cfg.tf {
            return Err(Error::InvalidArgument(
                "time grid must lie inside the drive window".into(),
            )
            .into());
        }
    } else {
        return Ok(Vec::new());
    }
    let t_end = *t_grid.last().expect("non-empty");

    let rhs = |t: T, y: &[T; 3]| {
        let (om, de) = cfg.drive_at(t)?;
        wn_rhs(&WeiNormanParams::from_array(*y), om, de).map_err(|e| with_time(e, t.as_f64()))
    };
    let guard = |seg: &crate::ode::Segment<T, 3>| {
        let (c_start, c_end) = (seg.y_start()[1].cos(), seg.y_end()[1].cos());
        if c_start.signum() != c_end.signum() || c_end.abs() <= T::lit(SINGULAR_THRESHOLD) {
            Err(Error::GimbalSingularity {
                t: seg.t_end().as_f64(),
                cos_y2: c_end.as_f64(),
            })
        } else {
            Ok(())
        }
    };
    let sample = |dense: &crate::ode::DenseSolution<T, 3>, upto: T| -> WeiNormanTrajectory<T> {
        t_grid
            .iter()
            .take_while(|&&t| t <= upto)
            .map(|&t| (t, WeiNormanParams::from_array(dense.at(t))))
            .collect()
    };

    match dopri5(
        rhs,
        cfg.t0,
        [T::zero(); 3],
        t_end,
        &OdeOptions::with_tol(tol),
        guard,
    ) {
        Ok(dense) => Ok(sample(&dense, t_end)),
        Err(stop) => {
            let reached = stop.partial.t_end();
            Err(WnSolveError {
                partial: sample(&stop.partial, reached),
                error: stop.error,
            })
        }
    }
}

/// M = exp(Υ₁𝓕₁)·exp(Υ₂𝓕₂)·exp(Υ₃𝓕₃).
pub fn wn_propagator<T: Real>(y: &WeiNormanParams<T>) -> Result<Propagator3<T>> {
    let mut out = Propagator3::identity();
    for (k, angle) in y.to_array().into_iter().enumerate() {
        let gen = adjoint_generator::<T>(k + 1)?;
        out = Propagator3::from_matrix(*out.matrix() * *sylvester_exp(&gen.scale(angle))?.matrix());
    }
    Ok(out)
}
