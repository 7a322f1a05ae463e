// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Lab-frame and effective two-level Hamiltonians.
//!
//! All frequencies are in units of the carrier `ω` unless a caller picks a
//! different unit consistently. Matrices use the `(|e⟩, |g⟩)` ordering.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::bessel_j_seq;
use crate::numerics::linalg::{c, identity, pauli_combination, sigma_x, sigma_z, zeros, CMatrix};

/// Largest frame parameter for which the CHRW model is considered valid.
pub const Z_VALIDITY_MAX: f64 = 1.2;
/// Default truncation order for the higher-harmonic remainder.
pub const DEFAULT_M_MAX: u32 = 12;

/// Instantaneous amplitude and phase of one carrier tone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveTone {
    pub amplitude: f64,
    pub phase: f64,
}

/// Lab parameters frozen at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabSnapshot {
    pub qubit_frequency: f64,
    pub tones: [DriveTone; 2],
}

/// A driven qubit with time-dependent frequency and two in-phase/quadrature
/// tones sharing one carrier frequency.
pub trait LabSystem: Sync {
    fn drive_frequency(&self) -> f64;
    fn snapshot(&self, t: f64) -> LabSnapshot;
    /// Times where the waveforms have kinks (sample points of a program).
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

/// Time-independent lab system, handy for constant drives and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticLab {
    pub omega: f64,
    pub state: LabSnapshot,
}

impl LabSystem for StaticLab {
    fn drive_frequency(&self) -> f64 {
        self.omega
    }
    fn snapshot(&self, _t: f64) -> LabSnapshot {
        self.state
    }
}

/// Which effective description a simulation is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Rwa,
    RwaBs,
    Chrw,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Chrw, ProtocolKind::RwaBs, ProtocolKind::Rwa];

    /// True for the two models written in the frame rotating at `ω`.
    pub fn is_rotating_frame(self) -> bool {
        !matches!(self, ProtocolKind::Chrw)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Rwa => "RWA",
            ProtocolKind::RwaBs => "RWA-BS",
            ProtocolKind::Chrw => "CHRW",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('_', "-").as_str() {
            "RWA" => Ok(ProtocolKind::Rwa),
            "RWA-BS" | "RWABS" => Ok(ProtocolKind::RwaBs),
            "CHRW" => Ok(ProtocolKind::Chrw),
            other => Err(Error::Domain(format!("unknown protocol '{other}'"))),
        }
    }
}

/// Coefficients of an effective model at one instant.
///
/// `amplitude` and `phase` define the coupling `amplitude·(e^{iφ}σ₋ + h.c.)`.
/// For the rotating-frame models `detuning` is `ω_q − ω`; for CHRW it is
/// `ω_q J₀(Z) − ω`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectivePoint {
    pub detuning: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub bs_shift: f64,
    pub z: f64,
}

/// A time-dependent effective model tied to a carrier frequency.
pub trait ProtocolModel: Sync {
    fn kind(&self) -> ProtocolKind;
    fn drive_frequency(&self) -> f64;
    fn effective(&self, t: f64) -> EffectivePoint;
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

/// `(ω_q/2)σ_z + Σ_n Ω_n cos(ωt + φ_n) σ_x`.
pub fn lab_hamiltonian<S: LabSystem + ?Sized>(sys: &S, t: f64) -> CMatrix {
    lab_hamiltonian_from(&sys.snapshot(t), sys.drive_frequency(), t)
}

/// Same as [`lab_hamiltonian`] for an explicit snapshot.
pub fn lab_hamiltonian_from(snap: &LabSnapshot, omega: f64, t: f64) -> CMatrix {
    let drive: f64 = snap
        .tones
        .iter()
        .map(|tone| tone.amplitude * (omega * t + tone.phase).cos())
        .sum();
    pauli_combination(drive, 0.0, 0.5 * snap.qubit_frequency)
}

fn coupling_form(detuning_half: f64, amplitude: f64, phase: f64) -> CMatrix {
    pauli_combination(amplitude * phase.cos(), amplitude * phase.sin(), detuning_half)
}

/// `(Δ_q/2)σ_z + A(e^{iφ}σ₋ + h.c.)`, ignoring any Bloch–Siegert term.
pub fn rwa_hamiltonian(p: &EffectivePoint) -> CMatrix {
    coupling_form(0.5 * p.detuning, p.amplitude, p.phase)
}

/// [`rwa_hamiltonian`] plus `bs_shift·σ_z`.
pub fn rwa_bs_hamiltonian(p: &EffectivePoint) -> CMatrix {
    coupling_form(0.5 * p.detuning + p.bs_shift, p.amplitude, p.phase)
}

/// `(Δ̃_q/2)σ_z + Ω̃₀(e^{iφ₀}σ₋ + h.c.)`.
///
/// Frame parameters outside `[0, 1.2]` are logged as a warning but still
/// evaluated.
pub fn chrw_hamiltonian(p: &EffectivePoint) -> CMatrix {
    if !(0.0..=Z_VALIDITY_MAX).contains(&p.z) {
        log::warn!("CHRW frame parameter Z = {} outside [0, {Z_VALIDITY_MAX}]", p.z);
    }
    coupling_form(0.5 * p.detuning, p.amplitude, p.phase)
}

/// The model's own-frame Hamiltonian at time `t`.
pub fn effective_hamiltonian<M: ProtocolModel + ?Sized>(model: &M, t: f64) -> CMatrix {
    let p = model.effective(t);
    match model.kind() {
        ProtocolKind::Rwa => rwa_hamiltonian(&p),
        ProtocolKind::RwaBs => rwa_bs_hamiltonian(&p),
        ProtocolKind::Chrw => chrw_hamiltonian(&p),
    }
}

/// Bloch–Siegert shift `Σ Ω_n²/(8ω)`.
pub fn bs_shift(tones: &[DriveTone], omega: f64) -> f64 {
    tones.iter().map(|tone| tone.amplitude * tone.amplitude).sum::<f64>() / (8.0 * omega)
}

/// `S = exp[i(Z/2) sin τ σ_x]`.
pub fn generator_s(z: f64, tau: f64) -> CMatrix {
    let x = 0.5 * z * tau.sin();
    identity(2) * c(x.cos(), 0.0) + sigma_x() * c(0.0, x.sin())
}

/// `R = exp(iωtσ_z/2) = diag(e^{iωt/2}, e^{−iωt/2})`.
pub fn rotating_frame(omega: f64, t: f64) -> CMatrix {
    let half = 0.5 * omega * t;
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, half).exp(), c(0.0, -half).exp()]))
}

/// Lab Hamiltonian after the `S(t)` transformation, split by harmonic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedTerms {
    /// `(ω_q/2)J₀(Z)σ_z`
    pub h0: CMatrix,
    /// `Ω̃₀ cos τ σ_x + ω_q J₁(Z) sin τ σ_y`
    pub h1: CMatrix,
    /// Higher harmonics truncated at `m_max`.
    pub h2: CMatrix,
    /// `Ω̃₀ = Ω₀ − (Z/2)(ω + φ̇₀)`
    pub omega_tilde: f64,
}

/// Splits the transformed lab Hamiltonian into its Bessel-harmonic parts.
///
/// Assumes the second tone already satisfies `Ω₁ = Ż/2`, `φ₁ = φ₀ − π/2`, so
/// only the first tone's amplitude and phase enter.
pub fn transformed_terms(
    snap: &LabSnapshot,
    omega: f64,
    z: f64,
    phase_rate: f64,
    m_max: u32,
    t: f64,
) -> Result<TransformedTerms> {
    if m_max < 1 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let wq = snap.qubit_frequency;
    let tone = snap.tones[0];
    let tau = omega * t + tone.phase;
    let j = bessel_j_seq(2 * m_max + 1, z)?;
    let omega_tilde = tone.amplitude - 0.5 * z * (omega + phase_rate);

    let h0 = sigma_z() * c(0.5 * wq * j[0], 0.0);
    let h1 = pauli_combination(omega_tilde * tau.cos(), wq * j[1] * tau.sin(), 0.0);
    let mut h2 = zeros(2);
    for m in 1..=m_max as usize {
        let fm = m as f64;
        let y = wq * j[2 * m + 1] * ((2.0 * fm + 1.0) * tau).sin();
        let zc = wq * j[2 * m] * (2.0 * fm * tau).cos();
        h2 += pauli_combination(0.0, y, zc);
    }
    Ok(TransformedTerms { h0, h1, h2, omega_tilde })
}
