//! Real 3-vectors and 3×3 matrices: coherence vectors, generator matrices
//! and propagators.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Expectation values (⟨G₁⟩, ⟨G₂⟩, ⟨G₃⟩) of the su(2) generators.
///
/// The same type holds F-frame components (F₁, F₂, F₃).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherenceVector<T> {
    pub g1: T,
    pub g2: T,
    pub g3: T,
}

impl<T: Copy> CoherenceVector<T> {
    pub const fn new(g1: T, g2: T, g3: T) -> Self {
        Self { g1, g2, g3 }
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.g1, self.g2, self.g3]
    }
}

impl<T: Real> CoherenceVector<T> {
    /// |0⟩⟨0|, i.e. (0, 0, 1).
    pub fn ground() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    /// |1⟩⟨1|, i.e. (0, 0, −1).
    pub fn excited() -> Self {
        Self::new(T::zero(), T::zero(), -T::one())
    }

    pub fn norm_squared(&self) -> T {
        self.g1 * self.g1 + self.g2 * self.g2 + self.g3 * self.g3
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.g1 - other.g1)
            .abs()
            .max((self.g2 - other.g2).abs())
            .max((self.g3 - other.g3).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.g1.is_finite() && self.g2.is_finite() && self.g3.is_finite()
    }
}

/// Dense 3×3 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix3<T> {
    pub m: [[T; 3]; 3],
}

impl<T> Matrix3<T> {
    pub const fn new(m: [[T; 3]; 3]) -> Self {
        Self { m }
    }
}

impl<T: Copy + Num> Matrix3<T> {
    pub fn zeros() -> Self {
        Self::new([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            out.m[i][i] = T::one();
        }
        out
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = f(i, j);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }

    pub fn determinant(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn mul_vec(&self, v: [T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<T: Real> Matrix3<T> {
    /// Max-entry norm ‖A‖∞ (largest absolute entry).
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    /// Largest entry of |A + Aᵀ|.
    pub fn antisymmetry_defect(&self) -> T {
        (*self + self.transpose()).max_abs()
    }

    /// Eigenvalues of a real 3×3 matrix as roots of its characteristic
    /// polynomial. One real root is polished by Newton iteration and the
    /// remaining quadratic is solved in closed form.
    pub fn eigenvalues(&self) -> [Complex<T>; 3] {
        let m = &self.m;
        // λ³ − c2 λ² + c1 λ − c0
        let c2 = self.trace();
        let c1 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
            + m[1][1] * m[2][2]
            - m[1][2] * m[2][1];
        let c0 = self.determinant();
        let p = |x: T| ((x - c2) * x + c1) * x - c0;
        let dp = |x: T| (T::lit(3.0) * x - T::lit(2.0) * c2) * x + c1;

        // Cauchy bound brackets every real root; p(−B) ≤ 0 ≤ p(B).
        let bound = T::one() + c2.abs().max(c1.abs()).max(c0.abs());
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            if p(mid) > T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut root = T::lit(0.5) * (lo + hi);
        for _ in 0..3 {
            let d = dp(root);
            if d != T::zero() {
                let next = root - p(root) / d;
                if next.is_finite() && p(next).abs() <= p(root).abs() {
                    root = next;
                }
            }
        }

        // Deflate: λ² + b λ + c with b = root − c2, c = c1 + root·b.
        let b = root - c2;
        let c = c1 + root * b;
        let disc = b * b - T::lit(4.0) * c;
        let half = T::lit(0.5);
        let (e1, e2) = if disc >= T::zero() {
            let s = disc.sqrt();
            (
                Complex::new(half * (-b + s), T::zero()),
                Complex::new(half * (-b - s), T::zero()),
            )
        } else {
            let s = (-disc).sqrt();
            (
                Complex::new(-half * b, half * s),
                Complex::new(-half * b, -half * s),
            )
        };
        [Complex::new(root, T::zero()), e1, e2]
    }

    /// Largest real part over the spectrum.
    pub fn spectral_abscissa(&self) -> T {
        self.eigenvalues()
            .iter()
            .fold(T::neg_infinity(), |acc, z| acc.max(z.re))
    }
}

impl<T> Index<(usize, usize)> for Matrix3<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.m[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.m[i][j]
    }
}

impl<T: Copy + Num> Add for Matrix3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl<T: Copy + Num> Sub for Matrix3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl<T: Copy + Num + Neg<Output = T>> Neg for Matrix3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.m[i][j])
    }
}

impl<T: Copy + Num> Mul for Matrix3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..3).fold(T::zero(), |acc, k| acc + self.m[i][k] * rhs.m[k][j]))
    }
}

impl<T: Copy + Num> Zero for Matrix3<T> {
    fn zero() -> Self {
        Self::zeros()
    }
    fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_zero())
    }
}

/// Real 3×3 matrix acting on coherence vectors, `G(t) = R(t, t₀) G(t₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagator3<T> {
    matrix: Matrix3<T>,
}

impl<T: Real> Propagator3<T> {
    pub fn identity() -> Self {
        Self::from_matrix(Matrix3::identity())
    }

    pub fn from_matrix(matrix: Matrix3<T>) -> Self {
        Self { matrix }
    }

    /// Propagator whose columns are the images of the three basis vectors.
    pub fn from_columns(cols: [CoherenceVector<T>; 3]) -> Self {
        Self::from_matrix(Matrix3::from_fn(|i, j| cols[j].to_array()[i]))
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.matrix
    }

    pub fn apply(&self, g: &CoherenceVector<T>) -> CoherenceVector<T> {
        CoherenceVector::from_array(self.matrix.mul_vec(g.to_array()))
    }

    /// `self · earlier`: evolve by `earlier` first, then by `self`.
    pub fn then_after(&self, earlier: &Self) -> Self {
        Self::from_matrix(self.matrix * earlier.matrix)
    }

    /// ‖RᵀR − I‖∞.
    pub fn orthogonality_defect(&self) -> T {
        (self.matrix.transpose() * self.matrix - Matrix3::identity()).max_abs()
    }

    pub fn determinant(&self) -> T {
        self.matrix.determinant()
    }

    /// Checks RᵀR = I and det R = 1 within `tol`.
    pub fn check_special_orthogonal(&self, tol: T) -> Result<()> {
        let defect = self.orthogonality_defect();
        let det = self.determinant();
        if defect < tol && (det - T::one()).abs() < tol {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "propagator not special-orthogonal: |R^T R - I| = {:e}, det = {}",
                defect.as_f64(),
                det.as_f64()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_transpose() {
        let a = Matrix3::new([[2.0, 0.0, 1.0], [1.0, 3.0, 0.0], [0.0, 1.0, 4.0]]);
        assert_eq!(a.determinant(), 25.0);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn eigenvalues_of_rotation_generator() {
        // hat(w) has spectrum {0, ±i|w|}
        let p = Matrix3::new([[0.0, -3.0, 2.0], [3.0, 0.0, -1.0], [-2.0, 1.0, 0.0]]);
        let xi = 14.0_f64.sqrt();
        let mut ims: Vec<f64> = p.eigenvalues().iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + xi).abs() < 1e-12);
        assert!(ims[1].abs() < 1e-12);
        assert!((ims[2] - xi).abs() < 1e-12);
        assert!(p.spectral_abscissa().abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d = Matrix3::new([[-1.0, 0.0, 0.0], [0.0, -2.5, 0.0], [0.0, 0.0, 0.5]]);
        let mut re: Vec<f64> = d.eigenvalues().iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 2.5).abs() < 1e-12);
        assert!((re[1] + 1.0).abs() < 1e-12);
        assert!((re[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn columns_round_trip() {
        let r = Propagator3::from_columns([
            CoherenceVector::new(1.0, 2.0, 3.0),
            CoherenceVector::new(4.0, 5.0, 6.0),
            CoherenceVector::new(7.0, 8.0, 9.0),
        ]);
        let e2 = CoherenceVector::new(0.0, 1.0, 0.0);
        assert_eq!(r.apply(&e2), CoherenceVector::new(4.0, 5.0, 6.0));
    }
}
