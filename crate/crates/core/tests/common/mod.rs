//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the library's numerics: the
//! matrices are plain arrays and the drive is re-derived from its formula.

#![allow(dead_code)]

pub type M3 = [[f64; 3]; 3];

pub fn mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn add(a: &M3, b: &M3) -> M3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn scale(a: &M3, s: f64) -> M3 {
    let mut c = *a;
    c.iter_mut().flatten().for_each(|x| *x *= s);
    c
}

pub fn comm(a: &M3, b: &M3) -> M3 {
    add(&mul(a, b), &scale(&mul(b, a), -1.0))
}

pub fn eye() -> M3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn max_abs_diff(a: &M3, b: &M3) -> f64 {
    (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - b[i][j]).abs())
        .fold(0.0, f64::max)
}

/// Antisymmetric matrix with v × w = hat(v) w.
pub fn hat(v: [f64; 3]) -> M3 {
    [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(a: &M3) -> M3 {
    let norm = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())) * 3.0;
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let b = scale(a, f64::powi(2.0, -s));
    let mut term = eye();
    let mut sum = eye();
    for k in 1..=24 {
        term = scale(&mul(&term, &b), 1.0 / k as f64);
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// The generator of motion for Rabi frequency `om` and detuning `de`:
/// dG/dt = g·G with torque (Ω, 0, −Δ).
pub fn generator(om: f64, de: f64) -> M3 {
    hat([om, 0.0, -de])
}

/// Ω₀ sin²(πt/T) on [0, T].
pub fn sin2(peak: f64, duration: f64, t: f64) -> f64 {
    if (0.0..=duration).contains(&t) {
        peak * (std::f64::consts::PI * t / duration).sin().powi(2)
    } else {
        0.0
    }
}

/// Closed-form resonance solution from the ground state: rotation by the
/// accumulated area θ about the first axis.
pub fn resonance_ground(theta: f64) -> [f64; 3] {
    [0.0, -theta.sin(), theta.cos()]
}

/// Pulse area of the sin² pulse up to t from its antiderivative.
pub fn sin2_area(peak: f64, duration: f64, t: f64) -> f64 {
    let t = t.clamp(0.0, duration);
    let w = std::f64::consts::PI / duration;
    peak * (t / 2.0 - (2.0 * w * t).sin() / (4.0 * w))
}

fn gauss_legendre_20() -> ([f64; 20], [f64; 20]) {
    // nodes on [-1, 1] by Newton iteration on P₂₀
    let n = 20;
    let mut x = [0.0; 20];
    let mut w = [0.0; 20];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
    }
    (x, w)
}

/// ∫₀ᵇ f by 20-point Gauss-Legendre.
pub fn gauss(f: impl Fn(f64) -> f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre_20();
    let h = 0.5 * b;
    (0..20).map(|i| w[i] * f(h * (x[i] + 1.0))).sum::<f64>() * h
}

fn gauss_m(f: impl Fn(f64) -> M3, b: f64) -> M3 {
    let (x, w) = gauss_legendre_20();
    let h = 0.5 * b;
    let mut acc = [[0.0; 3]; 3];
    for i in 0..20 {
        acc = add(&acc, &scale(&f(h * (x[i] + 1.0)), w[i] * h));
    }
    acc
}

/// Second and third Magnus terms
/// Ω₂ = ½∫∫[A₁,A₂], Ω₃ = ⅙∭([A₁,[A₂,A₃]] + [A₃,[A₂,A₁]]) over t > t₁ > t₂ > t₃,
/// evaluated by brute force: composite Simpson over t₁ with `outer` nodes
/// and Gauss-Legendre for the inner variables.
pub fn magnus_23(a: impl Fn(f64) -> M3, t: f64, outer: usize) -> (M3, M3) {
    assert!(outer % 2 == 1 && outer >= 3);
    let h = t / (outer - 1) as f64;
    let mut m2 = [[0.0; 3]; 3];
    let mut m3 = [[0.0; 3]; 3];
    for i in 0..outer {
        let t1 = i as f64 * h;
        let wt = if i == 0 || i == outer - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
        let a1 = a(t1);
        let inner2 = gauss_m(|t2| comm(&a1, &a(t2)), t1);
        let inner3 = gauss_m(
            |t2| {
                let a2 = a(t2);
                gauss_m(
                    |t3| {
                        let a3 = a(t3);
                        add(&comm(&a1, &comm(&a2, &a3)), &comm(&a3, &comm(&a2, &a1)))
                    },
                    t2,
                )
            },
            t1,
        );
        m2 = add(&m2, &scale(&inner2, 0.5 * wt));
        m3 = add(&m3, &scale(&inner3, wt / 6.0));
    }
    (m2, m3)
}

/// λ₀, λ₁, λ₂ read off the brute-force Magnus terms: λ₀ is the (1,3)
/// entry of Ω₂, λ₁ the (1,2) and λ₂ the (3,2) entry of Ω₃.
pub fn lambdas_oracle(a: impl Fn(f64) -> M3, t: f64, outer: usize) -> [f64; 3] {
    let (m2, m3) = magnus_23(a, t, outer);
    [m2[0][2], m3[0][1], m3[2][1]]
}

/// Deterministic Bloch-ball samples.
pub fn ball_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            out.push(v);
        }
    }
    out
}

/// Deterministic antisymmetric matrices with entries in [-r, r].
pub fn antisymmetric_samples(n: usize, r: f64, seed: u64) -> Vec<M3> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            hat([
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
            ])
        })
        .collect()
}
