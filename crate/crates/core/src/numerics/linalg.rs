// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrices and the Pauli algebra.
//!
//! Two-level operators use the ordering `(|e>, |g>)`, so `sigma_z = diag(1, -1)`
//! and `sigma_minus = |g><e|` has its single nonzero entry at row 1, column 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(0.0), -I, I, r(0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-1.0)])
}

/// Lowering operator `|g><e|`.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(0.0), r(0.0), r(1.0), r(0.0)])
}

/// Raising operator `|e><g|`.
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(0.0), r(0.0)])
}

/// `a*sigma_x + b*sigma_y + z*sigma_z` for real coefficients, built directly.
pub fn pauli_combination(x: f64, y: f64, z: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[r(z), c(x, -y), c(x, y), r(-z)])
}

/// Largest entry modulus, the `‖·‖∞` used for all matrix tolerances.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

/// Closest unitary in the Frobenius sense, `W V†` from `U = W Σ V†`.
pub fn polar_project(u: &CMatrix) -> CMatrix {
    let svd = u.clone().svd(true, true);
    let w = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    w * v_t
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal `diag(a, b)`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows() + b.nrows();
    let mut out = zeros(n);
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Minimum distance `min_χ ‖a - e^{iχ} b‖∞` over global phases, using the
/// phase that aligns the traces.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        r(1.0)
    };
    max_abs(&(a - b * phase))
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Hermitian part of a matrix, used to remove rounding-level skew.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * r(0.5)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let eig = hermitize(m).symmetric_eigen();
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        assert!(max_abs(&(&x * &y - &z * I)) < 1e-15);
        assert!(max_abs(&(&y * &z - &x * I)) < 1e-15);
        assert!(max_abs(&(&z * &x - &y * I)) < 1e-15);
        let sm = sigma_minus();
        assert!(max_abs(&(&sm - (&x - &y * I) * r(0.5))) < 1e-15);
        assert!(max_abs(&(pauli_combination(0.3, -0.2, 0.7) - (x * r(0.3) - y * r(0.2) + z * r(0.7)))) < 1e-15);
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let mut u = sigma_x() * I;
        u[(0, 1)] += c(1e-6, -2e-6);
        assert!(unitarity_defect(&u) > 1e-7);
        let p = polar_project(&u);
        assert!(unitarity_defect(&p) < 1e-14);
        assert!(max_abs(&(p - u)) < 1e-5);
    }

    #[test]
    fn block_diag_layout() {
        let b = block_diag(&identity(2), &sigma_x());
        assert_eq!(b.nrows(), 4);
        assert_eq!(b[(0, 0)], r(1.0));
        assert_eq!(b[(2, 3)], r(1.0));
        assert_eq!(b[(0, 2)], r(0.0));
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let u = sigma_y();
        let v = &u * c(0.6, 0.8);
        assert!(phase_aligned_distance(&u, &v) < 1e-15);
    }
}
