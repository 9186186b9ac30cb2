//! Open-system coherence-vector dynamics with the phenomenological
//! relaxation matrix
//!
//! ```text
//! [ −Γ₀₁      Δ − Γ′₀₁    0    ]
//! [ −Δ + Γ′₀₁   −Γ₁₀     −Ω    ]
//! [   0          Ω     −2γ₀₁   ]
//! ```
//!
//! The model is homogeneous, so the only fixed point is G = 0.

use serde::{Deserialize, Serialize};

use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::propagators::ReferenceSolution;
use crate::scalar::Real;
use crate::state::{CoherenceVector, Matrix3};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelaxationRates<T> {
    /// Γ₀₁
    pub gamma_pop_01: T,
    /// Γ₁₀
    pub gamma_pop_10: T,
    /// Γ′₀₁
    pub gamma_shift: T,
    /// γ₀₁ (= γ₁₀)
    pub gamma_deph: T,
}

impl<T: Real> RelaxationRates<T> {
    pub fn zero() -> Self {
        Self {
            gamma_pop_01: T::zero(),
            gamma_pop_10: T::zero(),
            gamma_shift: T::zero(),
            gamma_deph: T::zero(),
        }
    }

    pub fn dephasing(gamma: T) -> Self {
        Self {
            gamma_deph: gamma,
            ..Self::zero()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma_pop_01,
            self.gamma_pop_10,
            self.gamma_shift,
            self.gamma_deph,
        ];
        if all.iter().all(|r| r.is_finite() && *r >= T::zero()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "relaxation rates must be finite and non-negative: {self:?}"
            )))
        }
    }

    pub fn is_zero(&self) -> bool {
        [
            self.gamma_pop_01,
            self.gamma_pop_10,
            self.gamma_shift,
            self.gamma_deph,
        ]
        .iter()
        .all(|r| *r == T::zero())
    }
}

pub fn relaxation_matrix<T: Real>(omega: T, delta: T, rates: &RelaxationRates<T>) -> Matrix3<T> {
    let o = T::zero();
    let shift = delta - rates.gamma_shift;
    Matrix3::new([
        [-rates.gamma_pop_01, shift, o],
        [-shift, -rates.gamma_pop_10, -omega],
        [o, omega, -T::lit(2.0) * rates.gamma_deph],
    ])
}

/// dG/dt = A(Ω, Δ, rates)·G.
pub fn dissipative_rhs<T: Real>(
    g: &CoherenceVector<T>,
    omega: T,
    delta: T,
    rates: &RelaxationRates<T>,
) -> Result<[T; 3]> {
    rates.validate()?;
    Ok(relaxation_matrix(omega, delta, rates).mul_vec(g.to_array()))
}

pub fn integrate_dissipative<T: Real>(
    cfg: &DriveConfig<T>,
    rates: &RelaxationRates<T>,
    g0: &CoherenceVector<T>,
    tol: T,
) -> Result<ReferenceSolution<T>> {
    rates.validate()?;
    if !g0.is_finite() {
        return Err(Error::InvalidArgument(
            "initial coherence vector must be finite".into(),
        ));
    }
    let dense = ode::integrate(
        |t, y: &[T; 3]| {
            let (om, de) = cfg.drive_at(t)?;
            Ok(relaxation_matrix(om, de, rates).mul_vec(*y))
        },
        cfg.t0,
        g0.to_array(),
        cfg.tf,
        &OdeOptions::with_tol(tol),
    )?;
    Ok(ReferenceSolution::from_dense(dense))
}

/// Largest real part of the relaxation matrix spectrum along the drive,
/// sampled at `samples` uniform times.
pub fn max_spectral_abscissa<T: Real>(
    cfg: &DriveConfig<T>,
    rates: &RelaxationRates<T>,
    samples: usize,
) -> Result<T> {
    let mut worst = T::neg_infinity();
    for t in crate::propagators::uniform_times(cfg, samples) {
        let (om, de) = cfg.drive_at(t)?;
        worst = worst.max(relaxation_matrix(om, de, rates).spectral_abscissa());
    }
    Ok(worst)
}
