//! The su(2) algebra: Pauli generators, structure constants, the adjoint
//! representation, and the map from a torque vector to the antisymmetric
//! coefficient matrix of the coherence-vector equation of motion.
//!
//! Indices are 1-based (`1`, `2`, `3`) everywhere in the public API. The
//! exact pieces only require `num_traits::Num`, so they can be evaluated in
//! rational arithmetic as well as in floating point.

use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::Matrix3;

/// 2×2 complex matrix.
pub type Matrix2<T> = [[Complex<T>; 2]; 2];

/// Hermitian, traceless generator with Tr(GαGβ) = 2δαβ (a Pauli matrix).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator2<T> {
    pub entries: Matrix2<T>,
}

/// Real antisymmetric 3×3 matrix of the adjoint representation.
pub type AdjointGenerator<T> = Matrix3<T>;

fn check_index(index: usize) -> Result<()> {
    if (1..=3).contains(&index) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "generator index must be 1, 2 or 3, got {index}"
        )))
    }
}

/// Pauli matrix Gα.
pub fn generator<T: Copy + Num + Neg<Output = T>>(index: usize) -> Result<Generator2<T>> {
    check_index(index)?;
    let (o, l) = (T::zero(), T::one());
    let c = Complex::new;
    let entries = match index {
        1 => [[c(o, o), c(l, o)], [c(l, o), c(o, o)]],
        2 => [[c(o, o), c(o, -l)], [c(o, l), c(o, o)]],
        _ => [[c(l, o), c(o, o)], [c(o, o), c(-l, o)]],
    };
    Ok(Generator2 { entries })
}

/// The fully antisymmetric structure constants of su(2) (Levi-Civita symbol).
#[derive(Debug, Clone, Copy, Default)]
pub struct StructureConstants;

impl StructureConstants {
    /// f_{αβγ}; zero for repeated or out-of-range indices.
    pub fn get<T: Num + Neg<Output = T>>(&self, a: usize, b: usize, c: usize) -> T {
        match (a, b, c) {
            (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => T::one(),
            (1, 3, 2) | (2, 1, 3) | (3, 2, 1) => -T::one(),
            _ => T::zero(),
        }
    }
}

pub fn structure_constant<T: Num + Neg<Output = T>>(a: usize, b: usize, c: usize) -> T {
    StructureConstants.get(a, b, c)
}

pub fn mat2_mul<T: Copy + Num>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    let mut out = [[Complex::zero(); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_sub<T: Copy + Num>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mat2_trace<T: Copy + Num>(a: &Matrix2<T>) -> Complex<T> {
    a[0][0] + a[1][1]
}

/// Tr(Gα Gβ).
pub fn trace_product<T: Copy + Num + Neg<Output = T>>(a: usize, b: usize) -> Result<Complex<T>> {
    let ga = generator::<T>(a)?;
    let gb = generator::<T>(b)?;
    Ok(mat2_trace(&mat2_mul(&ga.entries, &gb.entries)))
}

/// Coefficients cγ with [Gα, Gβ] = 2i Σγ cγ Gγ, obtained by explicit matrix
/// products and projection cγ = Tr([Gα,Gβ] Gγ) / 4i.
pub fn commutator_check<T: Copy + Num + Neg<Output = T>>(a: usize, b: usize) -> Result<[T; 3]> {
    let ga = generator::<T>(a)?.entries;
    let gb = generator::<T>(b)?.entries;
    let comm = mat2_sub(&mat2_mul(&ga, &gb), &mat2_mul(&gb, &ga));
    let two = T::one() + T::one();
    let minus_i_quarter = Complex::new(T::zero(), -T::one() / (two + two));
    let mut out = [T::zero(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        let gc = generator::<T>(k + 1)?.entries;
        *o = (mat2_trace(&mat2_mul(&comm, &gc)) * minus_i_quarter).re;
    }
    Ok(out)
}

/// Adjoint generator 𝓕α with entries (𝓕α)_{βγ} = −f_{αβγ}.
pub fn adjoint_generator<T: Copy + Num + Neg<Output = T>>(
    index: usize,
) -> Result<AdjointGenerator<T>> {
    check_index(index)?;
    Ok(Matrix3::from_fn(|b, c| {
        -structure_constant::<T>(index, b + 1, c + 1)
    }))
}

/// Antisymmetric coefficient matrix g with g_{βα} = Σγ Γγ f_{γαβ}, so that
/// dG/dt = g·G for the Hamiltonian H = ½ Σ Γβ Gβ.
pub fn al_matrix_from_torque<T: Copy + Num + Neg<Output = T>>(torque: [T; 3]) -> Matrix3<T> {
    Matrix3::from_fn(|beta, alpha| {
        (0..3).fold(T::zero(), |acc, gamma| {
            acc + torque[gamma] * structure_constant::<T>(gamma + 1, alpha + 1, beta + 1)
        })
    })
}

/// H = ½ Σ Γβ Gβ + c·I.
pub fn hamiltonian_from_torque<T: Copy + Num + Neg<Output = T>>(
    torque: [T; 3],
    identity_part: T,
) -> Matrix2<T> {
    let two = T::one() + T::one();
    let mut h = [[Complex::zero(); 2]; 2];
    h[0][0] = Complex::new(identity_part, T::zero());
    h[1][1] = Complex::new(identity_part, T::zero());
    for (k, &gamma) in torque.iter().enumerate() {
        let g = generator::<T>(k + 1).expect("index in range").entries;
        let s = Complex::new(gamma / two, T::zero());
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = h[i][j] + g[i][j] * s;
            }
        }
    }
    h
}

/// Torque Γα = Tr(h·Gα) (ħ = 1); the identity component of `h` drops out.
pub fn torque_from_hamiltonian<T: Real>(h: &Matrix2<T>) -> Result<[T; 3]> {
    let scale = h
        .iter()
        .flatten()
        .fold(T::one(), |acc, z| acc.max(z.norm()));
    let tol = T::lit(1e-12) * scale;
    let herm = (h[0][0].im.abs() <= tol)
        && (h[1][1].im.abs() <= tol)
        && ((h[0][1] - h[1][0].conj()).norm() <= tol);
    if !herm {
        return Err(Error::InvalidArgument(
            "Hamiltonian must be Hermitian".into(),
        ));
    }
    let mut out = [T::zero(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        let g = generator::<T>(k + 1)?.entries;
        *o = mat2_trace(&mat2_mul(h, &g)).re;
    }
    Ok(out)
}
