//! Explicit adaptive Runge-Kutta 5(4) (Dormand-Prince) with the
//! fourth-order continuous extension of Hairer, Nørsett & Wanner.
//!
//! Fixed-size state `[T; N]`; the right-hand side may fail, and a step
//! observer can veto an accepted step. Either failure stops the integration
//! and hands back everything computed so far.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest step; defaults to a sixteenth of the interval.
    pub h_max: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_max: None,
            max_steps: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rtol > T::zero() && self.atol > T::zero() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "tolerances must be positive (rtol {}, atol {})",
                self.rtol, self.atol
            )))
        }
    }
}

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T, const N: usize> {
    pub t_start: T,
    pub h: T,
    cont: [[T; N]; 5],
}

impl<T: Real, const N: usize> Segment<T, N> {
    pub fn t_end(&self) -> T {
        self.t_start + self.h
    }

    pub fn eval(&self, t: T) -> [T; N] {
        let s = (t - self.t_start) / self.h;
        let s1 = T::one() - s;
        let c = &self.cont;
        let mut out = [T::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }

    pub fn y_start(&self) -> [T; N] {
        self.cont[0]
    }

    pub fn y_end(&self) -> [T; N] {
        let mut out = [T::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.cont[0][i] + self.cont[1][i];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution<T, const N: usize> {
    pub t0: T,
    pub y0: [T; N],
    pub segments: Vec<Segment<T, N>>,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl<T: Real, const N: usize> DenseSolution<T, N> {
    pub fn t_end(&self) -> T {
        self.segments.last().map_or(self.t0, |s| s.t_end())
    }

    pub fn y_end(&self) -> [T; N] {
        self.segments.last().map_or(self.y0, |s| s.y_end())
    }

    /// Dense output; `t` is clamped to the integrated interval.
    pub fn at(&self, t: T) -> [T; N] {
        if self.segments.is_empty() || t <= self.t0 {
            return self.y0;
        }
        if t >= self.t_end() {
            return self.y_end();
        }
        let idx = self
            .segments
            .partition_point(|s| s.t_end() < t)
            .min(self.segments.len() - 1);
        self.segments[idx].eval(t)
    }

    /// Accepted step endpoints, starting with `(t0, y0)`.
    pub fn steps(&self) -> Vec<(T, [T; N])> {
        std::iter::once((self.t0, self.y0))
            .chain(self.segments.iter().map(|s| (s.t_end(), s.y_end())))
            .collect()
    }
}

/// Integration stopped early; `partial` covers `[t0, partial.t_end()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interrupted<T, const N: usize> {
    pub partial: DenseSolution<T, N>,
    pub error: Error,
}

impl<T, const N: usize> From<Interrupted<T, N>> for Error {
    fn from(i: Interrupted<T, N>) -> Self {
        i.error
    }
}

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `tf` (`tf > t0`).
///
/// `on_step(segment)` runs after every accepted step; returning an error
/// discards that step and stops.
pub fn dopri5<T, const N: usize, F, S>(
    mut rhs: F,
    t0: T,
    y0: [T; N],
    tf: T,
    opts: &OdeOptions<T>,
    mut on_step: S,
) -> std::result::Result<DenseSolution<T, N>, Interrupted<T, N>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    S: FnMut(&Segment<T, N>) -> Result<()>,
{
    let mut sol = DenseSolution {
        t0,
        y0,
        segments: Vec::new(),
        rejected: 0,
        rhs_evals: 0,
    };
    macro_rules! bail {
        ($e:expr) => {
            return Err(Interrupted {
                partial: sol,
                error: $e,
            })
        };
    }
    if let Err(e) = opts.validate() {
        bail!(e);
    }
    if !(tf > t0) {
        if tf == t0 {
            return Ok(sol);
        }
        bail!(Error::InvalidArgument(
            "integration end precedes start".into()
        ));
    }

    let a: [[T; 6]; 7] = A.map(|row| row.map(T::lit));
    let c: [T; 7] = C.map(T::lit);
    let e: [T; 7] = E.map(T::lit);
    let d: [T; 7] = D.map(T::lit);

    let span = tf - t0;
    let h_max = opts.h_max.unwrap_or(span / T::lit(16.0)).min(span);
    let h_min = T::lit(16.0) * T::epsilon() * t0.abs().max(tf.abs()).max(T::one());
    let scale =
        |y: &[T; N], z: &[T; N], i: usize| opts.atol + opts.rtol * y[i].abs().max(z[i].abs());

    let mut t = t0;
    let mut y = y0;
    let mut k1 = match rhs(t, &y) {
        Ok(v) => v,
        Err(err) => bail!(err),
    };
    sol.rhs_evals += 1;

    // Initial step guess from the size of y and y'.
    let mut h = {
        let nf = T::from_usize(N).expect("state size");
        let (mut dy, mut df) = (T::zero(), T::zero());
        for i in 0..N {
            let sk = scale(&y, &y, i);
            dy += (y[i] / sk).powi(2);
            df += (k1[i] / sk).powi(2);
        }
        let (dy, df) = ((dy / nf).sqrt(), (df / nf).sqrt());
        let guess = if dy < T::lit(1e-5) || df < T::lit(1e-5) {
            T::lit(1e-6)
        } else {
            T::lit(0.01) * dy / df
        };
        guess.max(T::lit(100.0) * h_min).min(h_max)
    };

    let mut steps = 0usize;
    let mut last_rejected = false;
    while t < tf {
        if steps >= opts.max_steps {
            bail!(Error::MaxStepsExceeded {
                t: t.as_f64(),
                steps
            });
        }
        if h < h_min {
            bail!(Error::StepSizeUnderflow {
                t: t.as_f64(),
                h: h.as_f64()
            });
        }
        let last = t + h >= tf;
        if last {
            h = tf - t;
        }

        let mut k = [[T::zero(); N]; 7];
        k[0] = k1;
        let mut y_new = y;
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = T::zero();
                for j in 0..s {
                    acc += a[s][j] * k[j][i];
                }
                ys[i] += h * acc;
            }
            k[s] = match rhs(t + c[s] * h, &ys) {
                Ok(v) => v,
                Err(err) => bail!(err),
            };
            if s == 6 {
                // 7th stage evaluates at the 5th-order solution (FSAL)
                y_new = ys;
            }
        }
        sol.rhs_evals += 6;

        let mut err = T::zero();
        for i in 0..N {
            let mut ei = T::zero();
            for (s, ks) in k.iter().enumerate() {
                ei += e[s] * ks[i];
            }
            err += (h * ei / scale(&y, &y_new, i)).powi(2);
        }
        let err = (err / T::from_usize(N).expect("state size")).sqrt();

        let safety = T::lit(0.9);
        if err <= T::one() {
            let mut cont = [[T::zero(); N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut acc = T::zero();
                for (s, ks) in k.iter().enumerate() {
                    acc += d[s] * ks[i];
                }
                cont[4][i] = h * acc;
            }
            let t_new = if last { tf } else { t + h };
            let seg = Segment {
                t_start: t,
                h: t_new - t,
                cont,
            };
            if let Err(err) = on_step(&seg) {
                bail!(err);
            }
            sol.segments.push(seg);
            t = t_new;
            y = y_new;
            k1 = k[6];
            steps += 1;

            let mut fac = if err == T::zero() {
                T::lit(5.0)
            } else {
                (safety * err.powf(T::lit(-0.2))).min(T::lit(5.0))
            };
            if last_rejected {
                fac = fac.min(T::one());
            }
            h = (h * fac.max(T::lit(0.2))).min(h_max);
            last_rejected = false;
        } else {
            sol.rejected += 1;
            let fac = (safety * err.powf(T::lit(-0.2))).max(T::lit(0.1));
            h *= fac;
            last_rejected = true;
        }
    }
    Ok(sol)
}

/// Integration without a step observer, failing with the first error.
pub fn integrate<T, const N: usize, F>(
    rhs: F,
    t0: T,
    y0: [T; N],
    tf: T,
    opts: &OdeOptions<T>,
) -> Result<DenseSolution<T, N>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    dopri5(rhs, t0, y0, tf, opts, |_| Ok(())).map_err(Error::from)
}
