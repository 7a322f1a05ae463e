// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Fluxonium circuit Hamiltonian `4E_C Q² + (E_L/2)Φ² − E_J cos(Φ + φ_ext)`
//! with `[Φ, Q] = i`, diagonalized in the oscillator basis of its harmonic
//! part.
//!
//! Energies are `E/h` in GHz, so eigenvalue differences are transition
//! frequencies `ω/2π` in GHz.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;

pub const DEFAULT_BASIS: usize = 120;
pub const MIN_BASIS: usize = 40;
/// Relative change of `ω01`, `ω12` allowed when the basis is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxoniumParams {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    /// External flux `Φ_e/Φ₀` in radians.
    pub phi_ext: f64,
    pub n_basis: usize,
}

impl FluxoniumParams {
    /// `E_J = 5`, `E_C = 0.8`, `E_L = 1.1` GHz at half flux quantum.
    pub fn reference() -> Self {
        Self { e_c: 0.8, e_l: 1.1, e_j: 5.0, phi_ext: std::f64::consts::PI, n_basis: DEFAULT_BASIS }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_c > 0.0 && self.e_l > 0.0 && self.e_j >= 0.0) || !self.phi_ext.is_finite() {
            return Err(Error::Domain(format!(
                "invalid energies E_C = {}, E_L = {}, E_J = {}",
                self.e_c, self.e_l, self.e_j
            )));
        }
        if self.n_basis < MIN_BASIS {
            return Err(Error::Domain(format!("basis size {} below {MIN_BASIS}", self.n_basis)));
        }
        Ok(())
    }

    /// Plasma frequency `√(8E_C E_L)` of the harmonic part.
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }

    /// Zero-point flux `(2E_C/E_L)^{1/4}`, so `Φ = φ_zpf (a + a†)`.
    pub fn phi_zpf(&self) -> f64 {
        (2.0 * self.e_c / self.e_l).powf(0.25)
    }

    fn with_basis(&self, n: usize) -> Self {
        Self { n_basis: n, ..*self }
    }
}

/// Tridiagonal `Φ = φ_zpf (a + a†)` in the truncated oscillator basis.
pub fn flux_operator(p: &FluxoniumParams) -> DMatrix<f64> {
    let n = p.n_basis;
    let z = p.phi_zpf();
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        let v = z * (k as f64).sqrt();
        m[(k - 1, k)] = v;
        m[(k, k - 1)] = v;
    }
    m
}

/// `cos(Φ + φ_ext)` as the real part of `e^{iφ_ext} exp(iΦ)`.
///
/// `Φ` is real symmetric, so its exponential is evaluated through its
/// eigendecomposition `Φ = V diag(λ) Vᵀ`.
fn cosine_term(phi: &DMatrix<f64>, phi_ext: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(phi.clone());
    let f = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| (l + phi_ext).cos()));
    &eig.eigenvectors * DMatrix::from_diagonal(&f) * eig.eigenvectors.transpose()
}

fn real_hamiltonian(p: &FluxoniumParams) -> DMatrix<f64> {
    let n = p.n_basis;
    let mut h = DMatrix::zeros(n, n);
    let wp = p.plasma_frequency();
    for k in 0..n {
        h[(k, k)] = wp * (k as f64 + 0.5);
    }
    if p.e_j != 0.0 {
        h -= cosine_term(&flux_operator(p), p.phi_ext) * p.e_j;
    }
    // Remove rounding-level asymmetry from the eigendecomposition.
    (&h + h.transpose()) * 0.5
}

/// Hamiltonian matrix in the oscillator basis (real, returned as complex).
pub fn build_hamiltonian(p: &FluxoniumParams) -> Result<CMatrix> {
    p.validate()?;
    Ok(real_hamiltonian(p).map(|x| num_complex::Complex64::new(x, 0.0)))
}

fn sorted_eigen(p: &FluxoniumParams) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(real_hamiltonian(p));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

/// All eigenvalues of the truncated Hamiltonian, ascending.
pub fn eigenvalues(p: &FluxoniumParams) -> Result<Vec<f64>> {
    p.validate()?;
    Ok(sorted_eigen(p).0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub omega01: f64,
    pub omega12: f64,
    /// `ω12 − ω01`.
    pub anharmonicity: f64,
    /// Largest relative change of `ω01`, `ω12` when the basis is doubled.
    pub convergence: f64,
}

fn transitions(p: &FluxoniumParams) -> (f64, f64) {
    let e = sorted_eigen(p).0;
    (e[1] - e[0], e[2] - e[1])
}

/// Lowest transitions, checked against a basis of twice the size.
pub fn spectrum(p: &FluxoniumParams) -> Result<Spectrum> {
    p.validate()?;
    let (a01, a12) = transitions(p);
    let (b01, b12) = transitions(&p.with_basis(2 * p.n_basis));
    let convergence = ((a01 - b01) / b01).abs().max(((a12 - b12) / b12).abs());
    if !(convergence < CONVERGENCE_TOL) {
        return Err(Error::NoConvergence {
            what: format!("fluxonium spectrum at n_basis = {} (relative change {convergence:e})", p.n_basis),
            iterations: 1,
        });
    }
    Ok(Spectrum { omega01: a01, omega12: a12, anharmonicity: a12 - a01, convergence })
}

/// `|⟨i|Φ|j⟩|` for the three lowest eigenstates.
pub fn drive_matrix_elements(p: &FluxoniumParams) -> Result<[[f64; 3]; 3]> {
    p.validate()?;
    let (_, v) = sorted_eigen(p);
    let low = v.columns(0, 3).into_owned();
    let m = low.transpose() * flux_operator(p) * &low;
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)].abs();
        }
    }
    Ok(out)
}
