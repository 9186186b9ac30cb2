//! Coherence-vector propagation: adaptive reference integration, first and
//! third order Magnus exponentials (exponentiated with Sylvester's
//! formula), and the closed-form rotation in the F-frame.

use serde::{Deserialize, Serialize};

use crate::drive::{g_matrix, DetuningLaw, DriveConfig, FrameCoefficients};
use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution, OdeOptions};
use crate::quadrature::{cumulative_simpson, UniformGrid};
use crate::scalar::Real;
use crate::state::{CoherenceVector, Matrix3, Propagator3};

/// Default number of quadrature nodes for the Magnus integrals.
pub const DEFAULT_MAGNUS_GRID: usize = 2001;

/// Environment variable overriding [`DEFAULT_MAGNUS_GRID`].
pub const MAGNUS_GRID_ENV: &str = "BLOCH_MAGNUS_GRID";

/// Quadrature grid size, honouring `BLOCH_MAGNUS_GRID`. Even values are
/// bumped to the next odd count.
pub fn default_magnus_grid() -> Result<usize> {
    match std::env::var(MAGNUS_GRID_ENV) {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{MAGNUS_GRID_ENV} must be an integer, got {raw:?}"))
            })?;
            if n < 3 {
                return Err(Error::InvalidArgument(format!(
                    "{MAGNUS_GRID_ENV} must be >= 3"
                )));
            }
            Ok(n | 1)
        }
        Err(_) => Ok(DEFAULT_MAGNUS_GRID),
    }
}

/// Default reference tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub type Trajectory<T> = Vec<(T, CoherenceVector<T>)>;

/// `samples` equally spaced times covering the drive window.
pub fn uniform_times<T: Real>(cfg: &DriveConfig<T>, samples: usize) -> Vec<T> {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                cfg.tf
            } else {
                cfg.t0 + cfg.duration() * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()
            }
        })
        .collect()
}

/// Dense reference solution of dG/dt = g(t)·G.
#[derive(Debug, Clone)]
pub struct ReferenceSolution<T> {
    dense: DenseSolution<T, 3>,
}

impl<T: Real> ReferenceSolution<T> {
    pub fn from_dense(dense: DenseSolution<T, 3>) -> Self {
        Self { dense }
    }

    pub fn dense(&self) -> &DenseSolution<T, 3> {
        &self.dense
    }

    pub fn at(&self, t: T) -> CoherenceVector<T> {
        CoherenceVector::from_array(self.dense.at(t))
    }

    pub fn end(&self) -> CoherenceVector<T> {
        CoherenceVector::from_array(self.dense.y_end())
    }

    /// Values at the accepted step endpoints.
    pub fn steps(&self) -> Trajectory<T> {
        self.dense
            .steps()
            .into_iter()
            .map(|(t, y)| (t, CoherenceVector::from_array(y)))
            .collect()
    }

    /// Dense output on a user grid.
    pub fn sample(&self, times: &[T]) -> Trajectory<T> {
        times.iter().map(|&t| (t, self.at(t))).collect()
    }
}

fn check_state<T: Real>(g0: &CoherenceVector<T>) -> Result<()> {
    if g0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "initial coherence vector must be finite".into(),
        ))
    }
}

/// Adaptive Dormand-Prince integration of dG/dt = g(t)·G over the window.
pub fn integrate_reference<T: Real>(
    cfg: &DriveConfig<T>,
    g0: &CoherenceVector<T>,
    tol: T,
) -> Result<ReferenceSolution<T>> {
    check_state(g0)?;
    let dense = ode::integrate(
        |t, y: &[T; 3]| Ok(cfg.g_at(t)?.mul_vec(*y)),
        cfg.t0,
        g0.to_array(),
        cfg.tf,
        &OdeOptions::with_tol(tol),
    )?;
    Ok(ReferenceSolution { dense })
}

/// R(t, t₀) by integrating dR/dt = g(t)·R from the identity (all three
/// basis vectors at once).
pub fn reference_propagator<T: Real>(cfg: &DriveConfig<T>, t: T, tol: T) -> Result<Propagator3<T>> {
    let mut y0 = [T::zero(); 9];
    for i in 0..3 {
        y0[4 * i] = T::one();
    }
    let rhs = |s: T, y: &[T; 9]| {
        let g = cfg.g_at(s)?;
        let r = Matrix3::from_fn(|i, j| y[3 * i + j]);
        let d = g * r;
        let mut out = [T::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = d.m[i][j];
            }
        }
        Ok(out)
    };
    let sol = ode::integrate(rhs, cfg.t0, y0, t, &OdeOptions::with_tol(tol))?;
    let y = sol.y_end();
    Ok(Propagator3::from_matrix(Matrix3::from_fn(|i, j| {
        y[3 * i + j]
    })))
}

/// Accumulated Magnus integrals at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MagnusTerms<T> {
    /// Ω′ = ∫Ω
    pub omega_prime: T,
    /// Δ′ = ∫Δ
    pub delta_prime: T,
    pub lambda0: T,
    pub lambda1: T,
    pub lambda2: T,
    /// η = Δ′ + λ₁
    pub eta: T,
    /// ζ = Ω′ + λ₂
    pub zeta: T,
    /// ξ = √(λ₀² + ζ² + η²)
    pub xi: T,
}

impl<T: Real> MagnusTerms<T> {
    pub fn new(omega_prime: T, delta_prime: T, lambda0: T, lambda1: T, lambda2: T) -> Self {
        let eta = delta_prime + lambda1;
        let zeta = omega_prime + lambda2;
        let xi = (lambda0 * lambda0 + zeta * zeta + eta * eta).sqrt();
        Self {
            omega_prime,
            delta_prime,
            lambda0,
            lambda1,
            lambda2,
            eta,
            zeta,
            xi,
        }
    }

    /// P₁ = ∫ g.
    pub fn first_order_exponent(&self) -> Matrix3<T> {
        g_matrix(self.omega_prime, self.delta_prime)
    }

    /// P⁽³⁾ = [[0, η, λ₀], [−η, 0, −ζ], [−λ₀, ζ, 0]].
    pub fn third_order_exponent(&self) -> Matrix3<T> {
        let o = T::zero();
        Matrix3::new([
            [o, self.eta, self.lambda0],
            [-self.eta, o, -self.zeta],
            [-self.lambda0, self.zeta, o],
        ])
    }
}

/// Magnus integrals at every node of a uniform grid on `[t₀, t_end]`.
///
/// The nested integrals are reduced to chains of running integrals: with
/// Γ = (Ω, 0, −Δ) every commutator in the second and third Magnus terms is
/// a sum of products f₁(t₁) f₂(t₂) f₃(t₃) over the ordered simplex, and
/// ∭_{t₃<t₂<t₁<t} f₁f₂f₃ = C[f₁ · C[f₂ · C[f₃]]](t) where C is the running
/// integral from t₀. Time-dependent (proportional) detuning is handled by the
/// same chains.
#[derive(Debug, Clone)]
pub struct MagnusTable<T> {
    pub times: Vec<T>,
    pub terms: Vec<MagnusTerms<T>>,
}

impl<T: Real> MagnusTable<T> {
    pub fn build(cfg: &DriveConfig<T>, t_end: T, nodes: usize) -> Result<Self> {
        let grid = UniformGrid::simpson(cfg.t0, t_end, nodes)?;
        let times = grid.points();
        let h = grid.step();
        let mut omega = Vec::with_capacity(nodes);
        let mut delta = Vec::with_capacity(nodes);
        for &t in &times {
            let (o, d) = cfg.drive_at(t)?;
            omega.push(o);
            delta.push(d);
        }
        let cum = |f: &[T]| cumulative_simpson(f, h);
        let prod = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x * *y).collect::<Vec<T>>();
        let chain = |f1: &[T], f2: &[T], f3: &[T]| cum(&prod(f1, &cum(&prod(f2, &cum(f3)))));

        let w = cum(&omega);
        let d = cum(&delta);
        let n = times.len();
        let resonant = delta.iter().all(|x| *x == T::zero());

        let (l0, l1, l2) = if resonant {
            (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n])
        } else {
            // ½ ∫∫ (Ω₁Δ₂ − Δ₁Ω₂)
            let inner: Vec<T> = (0..n).map(|i| omega[i] * d[i] - delta[i] * w[i]).collect();
            let l0: Vec<T> = cum(&inner).into_iter().map(|x| T::lit(0.5) * x).collect();

            // first component of Γ₁×(Γ₂×Γ₃) + Γ₃×(Γ₂×Γ₁)
            let dod = chain(&delta, &omega, &delta);
            let ddo = chain(&delta, &delta, &omega);
            let odd = chain(&omega, &delta, &delta);
            // third component
            let ood = chain(&omega, &omega, &delta);
            let doo = chain(&delta, &omega, &omega);
            let odo = chain(&omega, &delta, &omega);

            let two = T::lit(2.0);
            let sixth = T::one() / T::lit(6.0);
            let l2: Vec<T> = (0..n)
                .map(|i| sixth * (two * dod[i] - ddo[i] - odd[i]))
                .collect();
            let l1: Vec<T> = (0..n)
                .map(|i| -sixth * (ood[i] + doo[i] - two * odo[i]))
                .collect();
            (l0, l1, l2)
        };

        let terms = (0..n)
            .map(|i| MagnusTerms::new(w[i], d[i], l0[i], l1[i], l2[i]))
            .collect();
        Ok(Self { times, terms })
    }

    pub fn last(&self) -> MagnusTerms<T> {
        *self.terms.last().expect("non-empty grid")
    }
}

/// Magnus integrals at time `t` on a fresh grid of `grid_points` nodes.
pub fn magnus_terms<T: Real>(
    cfg: &DriveConfig<T>,
    t: T,
    grid_points: usize,
) -> Result<MagnusTerms<T>> {
    if !(t >= cfg.t0) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} precedes the window start"
        )));
    }
    Ok(MagnusTable::build(cfg, t, grid_points)?.last())
}

/// ξ below which the rotation is evaluated from its quadratic Taylor form.
pub const SYLVESTER_DEGENERATE_XI: f64 = 1e-8;

/// exp(P) for antisymmetric P by Sylvester's formula.
///
/// P has eigenvalues {0, iξ, −iξ} with ξ = |(P₃₂, P₁₃, P₂₁)|. Summing
/// e^{γⱼ} Πₖ≠ⱼ (P − γₖI)/(γⱼ − γₖ) over the three eigenvalues and pairing the
/// complex-conjugate terms gives
/// exp(P) = (P² + ξ²I)/ξ² + cos ξ·(−P²/ξ²) + sin ξ·(P/ξ).
pub fn sylvester_exp<T: Real>(p: &Matrix3<T>) -> Result<Propagator3<T>> {
    let tol = T::lit(1e-12) * p.max_abs().max(T::one());
    if p.antisymmetry_defect() > tol {
        return Err(Error::InvalidArgument(format!(
            "Sylvester exponential needs an antisymmetric matrix (defect {:e})",
            p.antisymmetry_defect().as_f64()
        )));
    }
    let w = [p.m[2][1], p.m[0][2], p.m[1][0]];
    let xi = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let id = Matrix3::identity();
    let p2 = *p * *p;
    if xi < T::lit(SYLVESTER_DEGENERATE_XI) {
        return Ok(Propagator3::from_matrix(id + *p + p2.scale(T::lit(0.5))));
    }
    let inv_xi2 = T::one() / (xi * xi);
    // spectral projector of the zero eigenvalue
    let z0 = (p2 + id.scale(xi * xi)).scale(inv_xi2);
    // cos and sin parts of the conjugate pair e^{±iξ}
    let zc = p2.scale(-inv_xi2);
    let zs = p.scale(T::one() / xi);
    Ok(Propagator3::from_matrix(
        z0 + zc.scale(xi.cos()) + zs.scale(xi.sin()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MagnusOrder {
    First,
    Third,
}

impl MagnusOrder {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            1 => Ok(Self::First),
            3 => Ok(Self::Third),
            _ => Err(Error::InvalidArgument(format!(
                "Magnus order must be 1 or 3, got {order}"
            ))),
        }
    }

    fn exponent<T: Real>(self, terms: &MagnusTerms<T>) -> Matrix3<T> {
        match self {
            Self::First => terms.first_order_exponent(),
            Self::Third => terms.third_order_exponent(),
        }
    }
}

/// R(t, t₀) ≈ exp(P⁽ᵏ⁾(t)), computed afresh for `t`.
pub fn magnus_propagator<T: Real>(
    cfg: &DriveConfig<T>,
    t: T,
    order: MagnusOrder,
    grid_points: usize,
) -> Result<Propagator3<T>> {
    let terms = magnus_terms(cfg, t, grid_points)?;
    sylvester_exp(&order.exponent(&terms))
}

/// Magnus solution at `samples` uniform times over the window from one
/// shared cumulative grid. The grid is refined so that each sample lands on
/// an even node and has at least `grid_points` nodes.
pub fn magnus_trajectory<T: Real>(
    cfg: &DriveConfig<T>,
    g0: &CoherenceVector<T>,
    order: MagnusOrder,
    samples: usize,
    grid_points: usize,
) -> Result<Trajectory<T>> {
    check_state(g0)?;
    let m = samples.max(2);
    let stride = 2 * (grid_points.saturating_sub(1)).div_ceil(2 * (m - 1)).max(1);
    let table = MagnusTable::build(cfg, cfg.tf, stride * (m - 1) + 1)?;
    (0..m)
        .map(|j| {
            let idx = j * stride;
            let r = sylvester_exp(&order.exponent(&table.terms[idx]))?;
            Ok((table.times[idx], r.apply(g0)))
        })
        .collect()
}

/// ε′(t) = ∫ε, available when ε shares the envelope shape.
pub fn epsilon_area<T: Real>(cfg: &DriveConfig<T>, t: T) -> Result<T> {
    match cfg.detuning {
        DetuningLaw::Proportional { peak } => {
            Ok(cfg.envelope.peak.hypot(peak) * cfg.envelope.shape_integral(cfg.t0, t))
        }
        DetuningLaw::Constant(d) if d == T::zero() => Ok(cfg.pulse_area(t)),
        DetuningLaw::Constant(_) => Err(Error::ModeMismatch(
            "the F-frame propagator requires proportional detuning or exact resonance".into(),
        )),
    }
}

/// M(t, t₀) = rotation by ε′ about F₁, acting on F-frame vectors.
pub fn f_frame_propagator<T: Real>(cfg: &DriveConfig<T>, t: T) -> Result<Propagator3<T>> {
    let e = epsilon_area(cfg, t)?;
    let (c, s) = (e.cos(), e.sin());
    let (o, l) = (T::zero(), T::one());
    Ok(Propagator3::from_matrix(Matrix3::new([
        [l, o, o],
        [o, c, -s],
        [o, s, c],
    ])))
}

/// The stationary frame of a proportional or resonant drive.
pub fn stationary_frame<T: Real>(cfg: &DriveConfig<T>) -> Result<FrameCoefficients<T>> {
    epsilon_area(cfg, cfg.t0)?;
    cfg.frame_coefficients_at(cfg.t0)
}

/// F-frame trajectory `(t, F(t))` for the initial coherence vector `g0`.
pub fn f_frame_trajectory<T: Real>(
    cfg: &DriveConfig<T>,
    g0: &CoherenceVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    check_state(g0)?;
    let frame = stationary_frame(cfg)?;
    let f0 = crate::drive::to_f_frame(g0, &frame);
    times
        .iter()
        .map(|&t| Ok((t, f_frame_propagator(cfg, t)?.apply(&f0))))
        .collect()
}

/// The F-frame solution mapped back to G coordinates.
pub fn f_frame_solution<T: Real>(
    cfg: &DriveConfig<T>,
    g0: &CoherenceVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    let frame = stationary_frame(cfg)?;
    Ok(f_frame_trajectory(cfg, g0, times)?
        .into_iter()
        .map(|(t, f)| (t, crate::drive::from_f_frame(&f, &frame)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::adjoint_generator;
    use crate::drive::PulseEnvelope;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn resonant(area: f64) -> DriveConfig<f64> {
        DriveConfig::sin_squared_pulse(area, 2.0 * area, DetuningLaw::Constant(0.0)).unwrap()
    }

    #[test]
    fn zero_drive_is_stationary() {
        let cfg = resonant(1.0).switched_off();
        let sol = integrate_reference(&cfg, &CoherenceVector::ground(), 1e-10).unwrap();
        for (_, g) in sol.steps() {
            assert_eq!(g, CoherenceVector::ground());
        }
    }

    #[test]
    fn half_pi_and_pi_pulses() {
        let sol =
            integrate_reference(&resonant(FRAC_PI_2), &CoherenceVector::ground(), 1e-10).unwrap();
        assert!(
            sol.end()
                .max_abs_diff(&CoherenceVector::new(0.0, -1.0, 0.0))
                < 1e-8
        );
        let sol = integrate_reference(&resonant(PI), &CoherenceVector::ground(), 1e-10).unwrap();
        assert!(sol.end().max_abs_diff(&CoherenceVector::excited()) < 1e-8);
    }

    #[test]
    fn lambdas_vanish_on_resonance() {
        let t = magnus_terms(&resonant(1.3), 2.0, 101).unwrap();
        assert_eq!((t.lambda0, t.lambda1, t.lambda2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lambdas_vanish_for_constant_rabi_frequency() {
        let cfg = DriveConfig::new(
            PulseEnvelope::constant(0.8_f64),
            DetuningLaw::Constant(0.3),
            0.0,
            2.0,
        )
        .unwrap();
        let t = magnus_terms(&cfg, 2.0, 201).unwrap();
        assert!(t.lambda0.abs() < 1e-13);
        assert!(t.lambda1.abs() < 1e-13);
        assert!(t.lambda2.abs() < 1e-13);
        assert!((t.omega_prime - 1.6).abs() < 1e-13);
        assert!((t.delta_prime - 0.6).abs() < 1e-13);
    }

    #[test]
    fn lambdas_vanish_for_proportional_detuning() {
        let cfg =
            DriveConfig::sin_squared_pulse(1.0_f64, 2.0, DetuningLaw::Proportional { peak: 0.4 })
                .unwrap();
        let t = magnus_terms(&cfg, 1.5, 201).unwrap();
        assert!(t.lambda0.abs() < 1e-14 && t.lambda1.abs() < 1e-14 && t.lambda2.abs() < 1e-14);
    }

    #[test]
    fn magnus_grid_must_be_odd() {
        assert!(magnus_terms(&resonant(1.0), 1.0, 100).is_err());
    }

    #[test]
    fn sylvester_identity_and_axis_rotation() {
        assert_eq!(
            sylvester_exp(&Matrix3::<f64>::zeros()).unwrap(),
            Propagator3::identity()
        );
        let theta = 0.83;
        let f1 = adjoint_generator::<f64>(1).unwrap();
        let r = sylvester_exp(&f1.scale(theta)).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let expect = Matrix3::new([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]);
        assert!(r.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn sylvester_rejects_symmetric_input() {
        let p = Matrix3::new([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(matches!(sylvester_exp(&p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sylvester_small_angle_branch_is_continuous() {
        let f = |s: f64| Matrix3::new([[0.0, -s, 2.0 * s], [s, 0.0, -s], [-2.0 * s, s, 0.0]]);
        for s in [0.99e-8 / 6f64.sqrt(), 1.01e-8 / 6f64.sqrt()] {
            let p = f(s);
            let series = Matrix3::identity() + p + (p * p).scale(0.5);
            assert!(sylvester_exp(&p).unwrap().matrix().max_abs_diff(&series) < 1e-15);
        }
    }

    #[test]
    fn first_order_ground_state_closed_form() {
        let cfg =
            DriveConfig::sin_squared_pulse(1.1_f64, 2.2, DetuningLaw::Constant(0.15)).unwrap();
        let t = 1.7;
        let terms = magnus_terms(&cfg, t, 801).unwrap();
        let (op, dp) = (terms.omega_prime, terms.delta_prime);
        let xi = op.hypot(dp);
        let g = magnus_propagator(&cfg, t, MagnusOrder::First, 801)
            .unwrap()
            .apply(&CoherenceVector::ground());
        let expect = CoherenceVector::new(
            dp * op / (xi * xi) * (xi.cos() - 1.0),
            -op / xi * xi.sin(),
            dp * dp / (xi * xi) + op * op / (xi * xi) * xi.cos(),
        );
        assert!(g.max_abs_diff(&expect) < 1e-14);
        assert!((op - cfg.pulse_area(t)).abs() < 1e-10);
    }

    #[test]
    fn f_frame_requires_stationary_frame() {
        let cfg = DriveConfig::sin_squared_pulse(1.0, 2.0, DetuningLaw::Constant(0.2)).unwrap();
        assert!(matches!(
            f_frame_propagator(&cfg, 1.0),
            Err(Error::ModeMismatch(_))
        ));
        assert_eq!(
            f_frame_propagator(&resonant(1.0), 0.0).unwrap(),
            Propagator3::identity()
        );
    }

    #[test]
    fn f_frame_ground_state_solution() {
        let (o0, d0) = (1.0_f64, 0.5);
        let cfg = DriveConfig::new(
            PulseEnvelope::sin_squared(o0, 1.5, 3.0),
            DetuningLaw::Proportional { peak: d0 },
            0.0,
            3.0,
        )
        .unwrap();
        let e0 = (o0 * o0 + d0 * d0).sqrt();
        for (t, f) in
            f_frame_trajectory(&cfg, &CoherenceVector::ground(), &[0.0, 0.7, 2.9]).unwrap()
        {
            let ep = e0 * cfg.envelope.shape_integral(0.0, t);
            let expect = CoherenceVector::new(-d0 / e0, -o0 / e0 * ep.sin(), o0 / e0 * ep.cos());
            assert!(f.max_abs_diff(&expect) < 1e-15);
        }
    }
}
