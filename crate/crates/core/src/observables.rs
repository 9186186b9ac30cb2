//! Density matrices, populations and the conserved lengths of the F-frame.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::drive::{to_f_frame, DriveConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::CoherenceVector;

/// Two-level density matrix; ρ₁₀ = ρ₀₁* is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2<T> {
    pub rho00: T,
    pub rho11: T,
    pub rho01: Complex<T>,
}

impl<T: Real> DensityMatrix2<T> {
    pub fn new(rho00: T, rho11: T, rho01: Complex<T>) -> Self {
        Self {
            rho00,
            rho11,
            rho01,
        }
    }

    pub fn ground() -> Self {
        Self::new(T::one(), T::zero(), Complex::new(T::zero(), T::zero()))
    }

    pub fn excited() -> Self {
        Self::new(T::zero(), T::one(), Complex::new(T::zero(), T::zero()))
    }

    pub fn rho10(&self) -> Complex<T> {
        self.rho01.conj()
    }

    /// Tr ρ².
    pub fn purity(&self) -> T {
        self.rho00 * self.rho00 + self.rho11 * self.rho11 + T::lit(2.0) * self.rho01.norm_sqr()
    }

    /// Bloch transverse magnitude 2|ρ₀₁| = √(G₁² + G₂²).
    pub fn coherence_magnitude(&self) -> T {
        T::lit(2.0) * self.rho01.norm()
    }

    /// ρ₀₀ρ₁₁ − |ρ₀₁|², non-negative for physical states.
    pub fn determinant(&self) -> T {
        self.rho00 * self.rho11 - self.rho01.norm_sqr()
    }

    pub fn check(&self) -> Result<()> {
        let trace = self.rho00 + self.rho11;
        if !(trace - T::one()).abs().le(&T::lit(1e-10)) {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        if self.determinant() < T::lit(-1e-12) {
            return Err(Error::InvalidState(
                "density matrix is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

/// ⟨Gα⟩ = Tr(ρGα): G₁ = 2 Re ρ₀₁, G₂ = −2 Im ρ₀₁, G₃ = ρ₀₀ − ρ₁₁.
pub fn density_to_bloch<T: Real>(rho: &DensityMatrix2<T>) -> Result<CoherenceVector<T>> {
    rho.check()?;
    let two = T::lit(2.0);
    Ok(CoherenceVector::new(
        two * rho.rho01.re,
        -two * rho.rho01.im,
        rho.rho00 - rho.rho11,
    ))
}

/// ρ = I/2 + ½ Σ ⟨Gα⟩ Gα.
pub fn bloch_to_density<T: Real>(g: &CoherenceVector<T>) -> Result<DensityMatrix2<T>> {
    let norm = g.norm();
    if !(norm <= T::one() + T::lit(1e-10)) {
        return Err(Error::UnphysicalState {
            norm: norm.as_f64(),
        });
    }
    Ok(bloch_to_density_unchecked(g))
}

/// The same linear map as [`bloch_to_density`] without the norm check, for
/// reporting numerically propagated states.
pub fn bloch_to_density_unchecked<T: Real>(g: &CoherenceVector<T>) -> DensityMatrix2<T> {
    let half = T::lit(0.5);
    DensityMatrix2::new(
        half * (T::one() + g.g3),
        half * (T::one() - g.g3),
        Complex::new(half * g.g1, -half * g.g2),
    )
}

/// Conserved quantities at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationSample<T> {
    pub t: T,
    /// F₁²
    pub c1: T,
    /// F₂² + F₃²
    pub c23: T,
    /// F₁² + F₂² + F₃²
    pub total: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport<T> {
    pub samples: Vec<ConservationSample<T>>,
    /// Largest |c1(t) − c1(t₀)|.
    pub drift_c1: T,
    pub drift_c23: T,
    pub drift_total: T,
}

impl<T: Real> ConservationReport<T> {
    pub fn max_drift(&self) -> T {
        self.drift_c1.max(self.drift_c23).max(self.drift_total)
    }
}

/// Drift of F₁², F₂²+F₃² and the total squared length along an F-frame
/// trajectory. Purely diagnostic: nothing is asserted.
pub fn conservation_monitor<T: Real>(traj: &[(T, CoherenceVector<T>)]) -> ConservationReport<T> {
    let samples: Vec<ConservationSample<T>> = traj
        .iter()
        .map(|(t, f)| {
            let c1 = f.g1 * f.g1;
            let c23 = f.g2 * f.g2 + f.g3 * f.g3;
            ConservationSample {
                t: *t,
                c1,
                c23,
                total: c1 + c23,
            }
        })
        .collect();
    let (mut d1, mut d23, mut dt) = (T::zero(), T::zero(), T::zero());
    if let Some(first) = samples.first().copied() {
        for s in &samples {
            d1 = d1.max((s.c1 - first.c1).abs());
            d23 = d23.max((s.c23 - first.c23).abs());
            dt = dt.max((s.total - first.total).abs());
        }
    }
    ConservationReport {
        samples,
        drift_c1: d1,
        drift_c23: d23,
        drift_total: dt,
    }
}

/// Rotates a G trajectory into the F-frame using the drive's frame
/// coefficients at each sample time.
pub fn to_f_frame_trajectory<T: Real>(
    cfg: &DriveConfig<T>,
    traj: &[(T, CoherenceVector<T>)],
) -> Result<Vec<(T, CoherenceVector<T>)>> {
    traj.iter()
        .map(|(t, g)| Ok((*t, to_f_frame(g, &cfg.frame_coefficients_at(*t)?))))
        .collect()
}
