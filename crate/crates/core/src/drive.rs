//! Pulse envelopes, detuning laws and the instantaneous generator of motion.
//!
//! The Rabi frequency is written Ω(t) = Ω₀ q(t) with a shape function q
//! whose maximum is one. In proportional mode the detuning shares the same
//! shape, Δ(t) = Δ₀ q(t), which is what makes the F-frame stationary.

use serde::{Deserialize, Serialize};

use crate::algebra::al_matrix_from_torque;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{CoherenceVector, Matrix3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EnvelopeShape<T> {
    Constant,
    /// exp(−(t − center)² / 2 width²)
    Gaussian {
        center: T,
        width: T,
    },
    /// cos²(π (t − center) / width) on |t − center| ≤ width / 2, zero outside.
    SinSquared {
        center: T,
        width: T,
    },
    /// Piecewise-linear q(t) through `(times[i], values[i])`.
    Sampled {
        times: Vec<T>,
        values: Vec<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope<T> {
    pub shape: EnvelopeShape<T>,
    /// Ω₀, the peak Rabi frequency.
    pub peak: T,
}

impl<T: Real> PulseEnvelope<T> {
    pub fn constant(peak: T) -> Self {
        Self {
            shape: EnvelopeShape::Constant,
            peak,
        }
    }

    pub fn gaussian(peak: T, center: T, width: T) -> Self {
        Self {
            shape: EnvelopeShape::Gaussian { center, width },
            peak,
        }
    }

    pub fn sin_squared(peak: T, center: T, width: T) -> Self {
        Self {
            shape: EnvelopeShape::SinSquared { center, width },
            peak,
        }
    }

    /// Envelope through the sampled Rabi frequencies `(t, Ω)`.
    pub fn sampled(samples: &[(T, T)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "sampled envelope needs at least two points".into(),
            ));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument(
                "sampled envelope times must be strictly increasing".into(),
            ));
        }
        if samples
            .iter()
            .any(|&(t, v)| !t.is_finite() || !v.is_finite() || v < T::zero())
        {
            return Err(Error::InvalidArgument(
                "sampled envelope values must be finite and non-negative".into(),
            ));
        }
        let peak = samples.iter().fold(T::zero(), |m, &(_, v)| m.max(v));
        let norm = if peak > T::zero() { peak } else { T::one() };
        Ok(Self {
            shape: EnvelopeShape::Sampled {
                times: samples.iter().map(|s| s.0).collect(),
                values: samples.iter().map(|s| s.1 / norm).collect(),
            },
            peak,
        })
    }

    fn validate(&self) -> Result<()> {
        if !self.peak.is_finite() || self.peak < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "envelope peak must be finite and non-negative, got {}",
                self.peak
            )));
        }
        match &self.shape {
            EnvelopeShape::Constant => Ok(()),
            EnvelopeShape::Gaussian { center, width }
            | EnvelopeShape::SinSquared { center, width } => {
                if center.is_finite() && width.is_finite() && *width > T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "envelope width must be positive (center {center}, width {width})"
                    )))
                }
            }
            EnvelopeShape::Sampled { times, values } => {
                if times.len() != values.len() || times.len() < 2 {
                    return Err(Error::InvalidArgument("malformed sampled envelope".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument(
                        "sampled envelope times must be strictly increasing".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
                    return Err(Error::InvalidArgument(
                        "sampled envelope values must be non-negative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Shape function q(t).
    pub fn shape_at(&self, t: T) -> Result<T> {
        Ok(match &self.shape {
            EnvelopeShape::Constant => T::one(),
            EnvelopeShape::Gaussian { center, width } => {
                let x = (t - *center) / *width;
                (-T::lit(0.5) * x * x).exp()
            }
            EnvelopeShape::SinSquared { center, width } => {
                let s = t - *center;
                if s.abs() <= T::lit(0.5) * *width {
                    let c = (T::PI() * s / *width).cos();
                    c * c
                } else {
                    T::zero()
                }
            }
            EnvelopeShape::Sampled { times, values } => interpolate(times, values, t)?,
        })
    }

    /// ∫ₐᵇ q(t) dt in closed form.
    pub fn shape_integral(&self, a: T, b: T) -> T {
        match &self.shape {
            EnvelopeShape::Constant => b - a,
            EnvelopeShape::Gaussian { center, width } => {
                let s = *width * T::SQRT_2();
                let erf = |x: T| T::lit(libm::erf(((x - *center) / s).as_f64()));
                *width * (T::FRAC_PI_2()).sqrt() * (erf(b) - erf(a))
            }
            EnvelopeShape::SinSquared { center, width } => {
                let half = T::lit(0.5) * *width;
                let anti = |t: T| {
                    let s = (t - *center).max(-half).min(half);
                    T::lit(0.5) * s
                        + *width / (T::lit(4.0) * T::PI())
                            * (T::lit(2.0) * T::PI() * s / *width).sin()
                };
                anti(b) - anti(a)
            }
            EnvelopeShape::Sampled { times, values } => {
                if b < a {
                    return -self.shape_integral(b, a);
                }
                let mut total = T::zero();
                for i in 0..times.len() - 1 {
                    let (x0, x1) = (times[i], times[i + 1]);
                    let lo = x0.max(a);
                    let hi = x1.min(b);
                    if hi <= lo {
                        continue;
                    }
                    let slope = (values[i + 1] - values[i]) / (x1 - x0);
                    let f = |x: T| values[i] + slope * (x - x0);
                    total += T::lit(0.5) * (f(lo) + f(hi)) * (hi - lo);
                }
                total
            }
        }
    }
}

fn interpolate<T: Real>(times: &[T], values: &[T], t: T) -> Result<T> {
    let (first, last) = (times[0], times[times.len() - 1]);
    if !(t >= first && t <= last) {
        return Err(Error::OutOfDomain {
            t: t.as_f64(),
            start: first.as_f64(),
            end: last.as_f64(),
        });
    }
    let i = match times.binary_search_by(|x| x.partial_cmp(&t).expect("finite grid")) {
        Ok(i) => return Ok(values[i]),
        Err(i) => i - 1,
    };
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    Ok(values[i] + w * (values[i + 1] - values[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetuningLaw<T> {
    /// Δ(t) = Δ for all t.
    Constant(T),
    /// Δ(t) = Δ₀ q(t), sharing the envelope shape.
    Proportional { peak: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig<T> {
    pub envelope: PulseEnvelope<T>,
    pub detuning: DetuningLaw<T>,
    pub t0: T,
    pub tf: T,
    /// Level energies ω₁, ω₂. They only shift the Hamiltonian by a multiple
    /// of the identity and never enter the dynamics.
    pub level_energies: Option<[T; 2]>,
}

impl<T: Real> DriveConfig<T> {
    pub fn new(envelope: PulseEnvelope<T>, detuning: DetuningLaw<T>, t0: T, tf: T) -> Result<Self> {
        let cfg = Self {
            envelope,
            detuning,
            t0,
            tf,
            level_energies: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// sin² pulse filling `[0, duration]` with the given area.
    pub fn sin_squared_pulse(area: T, duration: T, detuning: DetuningLaw<T>) -> Result<Self> {
        let peak = T::lit(2.0) * area / duration;
        let half = T::lit(0.5) * duration;
        Self::new(
            PulseEnvelope::sin_squared(peak, half, duration),
            detuning,
            T::zero(),
            duration,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.envelope.validate()?;
        if !(self.t0.is_finite() && self.tf.is_finite() && self.tf > self.t0) {
            return Err(Error::InvalidArgument(format!(
                "window must satisfy t0 < tf, got [{}, {}]",
                self.t0, self.tf
            )));
        }
        let delta = match self.detuning {
            DetuningLaw::Constant(d) => d,
            DetuningLaw::Proportional { peak } => peak,
        };
        if !delta.is_finite() {
            return Err(Error::InvalidArgument("detuning must be finite".into()));
        }
        if let EnvelopeShape::Sampled { times, .. } = &self.envelope.shape {
            if times[0] > self.t0 || times[times.len() - 1] < self.tf {
                return Err(Error::InvalidArgument(
                    "sampled envelope must cover the simulation window".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn with_level_energies(mut self, w1: T, w2: T) -> Self {
        self.level_energies = Some([w1, w2]);
        self
    }

    pub fn duration(&self) -> T {
        self.tf - self.t0
    }

    pub fn omega_at(&self, t: T) -> Result<T> {
        Ok(self.envelope.peak * self.envelope.shape_at(t)?)
    }

    pub fn delta_at(&self, t: T) -> Result<T> {
        match self.detuning {
            DetuningLaw::Constant(d) => Ok(d),
            DetuningLaw::Proportional { peak } => Ok(peak * self.envelope.shape_at(t)?),
        }
    }

    /// (Ω(t), Δ(t)).
    pub fn drive_at(&self, t: T) -> Result<(T, T)> {
        let q = self.envelope.shape_at(t)?;
        let delta = match self.detuning {
            DetuningLaw::Constant(d) => d,
            DetuningLaw::Proportional { peak } => peak * q,
        };
        Ok((self.envelope.peak * q, delta))
    }

    /// Torque vector Γ(t) = (Ω, 0, −Δ).
    pub fn torque_at(&self, t: T) -> Result<[T; 3]> {
        let (om, de) = self.drive_at(t)?;
        Ok([om, T::zero(), -de])
    }

    pub fn g_at(&self, t: T) -> Result<Matrix3<T>> {
        let (om, de) = self.drive_at(t)?;
        Ok(g_matrix(om, de))
    }

    /// Ω′(t) = ∫_{t₀}^{t} Ω dt′.
    pub fn pulse_area(&self, t: T) -> T {
        self.envelope.peak * self.envelope.shape_integral(self.t0, t)
    }

    /// Δ′(t) = ∫_{t₀}^{t} Δ dt′.
    pub fn detuning_area(&self, t: T) -> T {
        match self.detuning {
            DetuningLaw::Constant(d) => d * (t - self.t0),
            DetuningLaw::Proportional { peak } => peak * self.envelope.shape_integral(self.t0, t),
        }
    }

    pub fn total_area(&self) -> T {
        self.pulse_area(self.tf)
    }

    /// Rescales the peak so the area over the window equals `target`.
    pub fn with_area(&self, target: T) -> Result<Self> {
        let unit = self.envelope.shape_integral(self.t0, self.tf);
        if !(unit > T::zero()) {
            return Err(Error::InvalidArgument(
                "cannot rescale an envelope with zero area".into(),
            ));
        }
        if !(target >= T::zero()) {
            return Err(Error::InvalidArgument(
                "pulse area must be non-negative".into(),
            ));
        }
        let mut out = self.clone();
        out.envelope.peak = target / unit;
        Ok(out)
    }

    /// Same configuration with the pulse turned off (Ω ≡ 0). Proportional
    /// detuning vanishes with it.
    pub fn switched_off(&self) -> Self {
        let mut out = self.clone();
        out.envelope.peak = T::zero();
        if let DetuningLaw::Proportional { .. } = out.detuning {
            out.detuning = DetuningLaw::Proportional { peak: T::zero() };
        }
        out
    }

    pub fn is_resonant(&self) -> bool {
        match self.detuning {
            DetuningLaw::Constant(d) => d == T::zero(),
            DetuningLaw::Proportional { peak } => peak == T::zero(),
        }
    }

    pub fn is_proportional(&self) -> bool {
        matches!(self.detuning, DetuningLaw::Proportional { .. })
    }

    /// |Δ₀ / Ω₀|, using the constant detuning value in constant mode.
    pub fn detuning_ratio(&self) -> T {
        let d = match self.detuning {
            DetuningLaw::Constant(d) => d,
            DetuningLaw::Proportional { peak } => peak,
        };
        if self.envelope.peak > T::zero() {
            (d / self.envelope.peak).abs()
        } else if d == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    }

    /// Frame coefficients used to rotate G into F at time `t`.
    ///
    /// Proportional mode uses the constant peak ratios; at exact resonance the
    /// frame is the identity; otherwise the instantaneous (Ω(t), Δ) are used.
    pub fn frame_coefficients_at(&self, t: T) -> Result<FrameCoefficients<T>> {
        match self.detuning {
            DetuningLaw::Proportional { peak } => {
                if self.envelope.peak == T::zero() && peak == T::zero() {
                    Ok(FrameCoefficients::identity(T::zero()))
                } else {
                    f_frame_coeffs(self.envelope.peak, peak)
                }
            }
            DetuningLaw::Constant(d) => {
                let om = self.omega_at(t)?;
                if d == T::zero() {
                    Ok(FrameCoefficients::identity(om))
                } else {
                    f_frame_coeffs(om, d)
                }
            }
        }
    }
}

pub fn omega_at<T: Real>(cfg: &DriveConfig<T>, t: T) -> Result<T> {
    cfg.omega_at(t)
}

pub fn pulse_area<T: Real>(cfg: &DriveConfig<T>, t: T) -> T {
    cfg.pulse_area(t)
}

/// g = [[0, Δ, 0], [−Δ, 0, −Ω], [0, Ω, 0]].
pub fn g_matrix<T: Real>(omega: T, delta: T) -> Matrix3<T> {
    let o = T::zero();
    Matrix3::new([[o, delta, o], [-delta, o, -omega], [o, omega, o]])
}

/// g assembled from the torque through the structure constants; identical to
/// [`g_matrix`].
pub fn g_matrix_from_torque<T: Real>(omega: T, delta: T) -> Matrix3<T> {
    al_matrix_from_torque([omega, T::zero(), -delta])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients<T> {
    /// ε = √(Ω² + Δ²)
    pub epsilon: T,
    /// Ω/ε
    pub omega_ratio: T,
    /// Δ/ε
    pub delta_ratio: T,
}

impl<T: Real> FrameCoefficients<T> {
    /// The resonance frame: F = G with ε = Ω.
    pub fn identity(omega: T) -> Self {
        Self {
            epsilon: omega.abs(),
            omega_ratio: T::one(),
            delta_ratio: T::zero(),
        }
    }
}

pub fn f_frame_coeffs<T: Real>(omega: T, delta: T) -> Result<FrameCoefficients<T>> {
    let epsilon = omega.hypot(delta);
    if epsilon == T::zero() {
        return Err(Error::DegenerateFrame);
    }
    Ok(FrameCoefficients {
        epsilon,
        omega_ratio: omega / epsilon,
        delta_ratio: delta / epsilon,
    })
}

/// F₁ = (Ω/ε)G₁ − (Δ/ε)G₃, F₂ = G₂, F₃ = (Δ/ε)G₁ + (Ω/ε)G₃.
pub fn to_f_frame<T: Real>(g: &CoherenceVector<T>, c: &FrameCoefficients<T>) -> CoherenceVector<T> {
    let (a, b) = (c.omega_ratio, c.delta_ratio);
    CoherenceVector::new(a * g.g1 - b * g.g3, g.g2, b * g.g1 + a * g.g3)
}

/// Inverse (transpose) of [`to_f_frame`].
pub fn from_f_frame<T: Real>(
    f: &CoherenceVector<T>,
    c: &FrameCoefficients<T>,
) -> CoherenceVector<T> {
    let (a, b) = (c.omega_ratio, c.delta_ratio);
    CoherenceVector::new(a * f.g1 + b * f.g3, f.g2, -b * f.g1 + a * f.g3)
}
