// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad dynamics under the exact lab Hamiltonian.
//!
//! `ρ̇ = −i[H, ρ] + γ 𝒟[σ₋]ρ + γ_φ 𝒟[σ_z]ρ` with
//! `𝒟[o]ρ = oρo† − ½{o†o, ρ}`. For two qubits each qubit gets its own pair
//! of channels with the same rates.
//!
//! Grid averages do not integrate one master equation per input state.
//! The evolution is linear in `ρ`, so the dynamical map is propagated once
//! as a `d² × d²` superoperator (column-stacked `vec ρ`) and applied to
//! every input state.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gatesim::{to_lab_frame, two_qubit_hamiltonian};
use crate::hamiltonians::{lab_hamiltonian, LabSystem, ProtocolKind};
use crate::numerics::linalg::{block_diag, c, hermitize, identity, kron, max_abs, min_eigenvalue, sigma_minus, sigma_z, CMatrix, CVector, I};
use crate::numerics::{evolve_at, ToleranceConfig};
use crate::pulse_synthesis::{synthesize_protocol, target_unitary, GatePreset, PulseProgram, DEFAULT_SAMPLES};

/// Negative eigenvalue beyond which an evolution is rejected.
pub const POSITIVITY_ABORT: f64 = 1e-6;

/// Relaxation and dephasing rates as angular frequencies in units of `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecoherenceRates {
    pub gamma: f64,
    pub gamma_phi: f64,
}

impl DecoherenceRates {
    pub fn new(gamma: f64, gamma_phi: f64) -> Result<Self> {
        let r = Self { gamma, gamma_phi };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma_phi >= 0.0) {
            return Err(Error::Domain(format!("rates must be non-negative (γ = {}, γ_φ = {})", self.gamma, self.gamma_phi)));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.gamma == 0.0 && self.gamma_phi == 0.0
    }
}

/// Conversion between physical frequencies and the dimensionless `ω = 1`
/// convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    /// `ω/2π` in Hz.
    pub drive_hz: f64,
}

impl Default for PhysicalUnits {
    fn default() -> Self {
        Self { drive_hz: 5e9 }
    }
}

impl PhysicalUnits {
    /// A rate given as `γ/2π` in Hz, expressed in units of `ω`.
    pub fn rate(&self, over_2pi_hz: f64) -> f64 {
        over_2pi_hz / self.drive_hz
    }

    /// Equal relaxation and dephasing, `γ/2π = γ_φ/2π = over_2pi_hz`.
    pub fn equal_rates(&self, over_2pi_hz: f64) -> DecoherenceRates {
        let g = self.rate(over_2pi_hz);
        DecoherenceRates { gamma: g, gamma_phi: g }
    }

    /// A dimensionless time in seconds.
    pub fn seconds(&self, t: f64) -> f64 {
        t / (2.0 * PI * self.drive_hz)
    }
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Domain("density matrix must be square and non-empty".into()));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > 1e-10 {
            return Err(Error::Domain(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = m.trace();
        if (tr - c(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::Domain(format!("density matrix trace {tr} differs from 1")));
        }
        let lam = min_eigenvalue(&m);
        if lam < -1e-8 {
            return Err(Error::Positivity(lam));
        }
        Ok(Self(m))
    }

    pub fn from_pure(psi: &CVector) -> Self {
        let n = psi.norm();
        let v = psi / c(n, 0.0);
        Self(&v * v.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.0 * psi)[(0, 0)].re
    }
}

/// Weighted jump operators for one or two qubits.
pub fn jump_operators(rates: &DecoherenceRates, dim: usize) -> Result<Vec<(f64, CMatrix)>> {
    let single = [(rates.gamma, sigma_minus()), (rates.gamma_phi, sigma_z())];
    match dim {
        2 => Ok(single.to_vec()),
        4 => {
            let id = identity(2);
            Ok(single
                .iter()
                .flat_map(|(g, o)| [(*g, kron(o, &id)), (*g, kron(&id, o))])
                .collect())
        }
        _ => Err(Error::Domain(format!("no dissipators defined for dimension {dim}"))),
    }
}

fn dissipate(rho: &CMatrix, ops: &[(f64, CMatrix)]) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for (g, o) in ops {
        if *g == 0.0 {
            continue;
        }
        let od = o.adjoint();
        let n = &od * o;
        out += (o * rho * &od - (&n * rho + rho * &n) * c(0.5, 0.0)) * c(*g, 0.0);
    }
    out
}

/// Right-hand side of the master equation for a 2- or 4-dimensional `ρ`.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, rates: &DecoherenceRates) -> Result<CMatrix> {
    if rho.shape() != h.shape() || rho.nrows() != rho.ncols() {
        return Err(Error::Domain(format!("ρ is {:?} but H is {:?}", rho.shape(), h.shape())));
    }
    let ops = jump_operators(rates, rho.nrows())?;
    Ok((h * rho - rho * h) * (-I) + dissipate(rho, &ops))
}

/// Lindblad generator acting on column-stacked `vec ρ`.
pub fn liouvillian(h: &CMatrix, ops: &[(f64, CMatrix)]) -> CMatrix {
    let d = h.nrows();
    let id = identity(d);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * (-I);
    for (g, o) in ops {
        if *g == 0.0 {
            continue;
        }
        let n = o.adjoint() * o;
        let term = kron(&o.conjugate(), o) - (kron(&id, &n) + kron(&n.transpose(), &id)) * c(0.5, 0.0);
        l += term * c(*g, 0.0);
    }
    l
}

fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

fn positivity_guard(rho: &CMatrix) -> Result<CMatrix> {
    let rho = hermitize(rho);
    let lam = min_eigenvalue(&rho);
    if lam < -POSITIVITY_ABORT {
        return Err(Error::Positivity(lam));
    }
    Ok(rho)
}

/// `ρ(t)` at each of `times` (sorted, `≥ 0`) starting from `ρ(0) = rho0`.
pub fn evolve_master_at<H>(
    rho0: &DensityMatrix,
    hamiltonian: H,
    rates: &DecoherenceRates,
    times: &[f64],
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<DensityMatrix>>
where
    H: Fn(f64) -> CMatrix,
{
    rates.validate()?;
    let ops = jump_operators(rates, rho0.dim())?;
    let states = evolve_at(
        |t, rho| (hamiltonian(t) * rho - rho * hamiltonian(t)) * (-I) + dissipate(rho, &ops),
        rho0.matrix(),
        0.0,
        times,
        breakpoints,
        tol,
    )?;
    states.iter().map(|s| positivity_guard(s).map(DensityMatrix)).collect()
}

pub fn evolve_master<H>(
    rho0: &DensityMatrix,
    hamiltonian: H,
    rates: &DecoherenceRates,
    t_end: f64,
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<DensityMatrix>
where
    H: Fn(f64) -> CMatrix,
{
    Ok(evolve_master_at(rho0, hamiltonian, rates, &[t_end], breakpoints, tol)?.remove(0))
}

/// The dynamical map `vec ρ(T) = Λ vec ρ(0)` of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub dim: usize,
    pub superop: CMatrix,
}

impl Channel {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.superop * vectorize(rho)), self.dim)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                out.view_mut((i * d, j * d), (d, d)).copy_from(&self.apply(&e));
            }
        }
        out
    }
}

/// Propagates the superoperator of the master equation over `[0, t_end]`.
pub fn master_channel<H>(
    hamiltonian: H,
    dim: usize,
    rates: &DecoherenceRates,
    t_end: f64,
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<Channel>
where
    H: Fn(f64) -> CMatrix,
{
    rates.validate()?;
    let ops = jump_operators(rates, dim)?;
    let superop = evolve_at(
        |t, lam| liouvillian(&hamiltonian(t), &ops) * lam,
        &identity(dim * dim),
        0.0,
        &[t_end],
        breakpoints,
        tol,
    )?
    .remove(0);
    let channel = Channel { dim, superop };
    let lam = min_eigenvalue(&channel.choi());
    if lam < -POSITIVITY_ABORT {
        return Err(Error::Positivity(lam));
    }
    Ok(channel)
}

/// One-qubit state `cos θ |g⟩ + sin θ e^{iφ} |e⟩` in `(|e⟩, |g⟩)` order.
pub fn input_state(theta: f64, phi: f64) -> CVector {
    CVector::from_vec(vec![c(0.0, phi).exp() * theta.sin(), c(theta.cos(), 0.0)])
}

/// `n_theta · n_phi` states with `θ_i = 2πi/n_theta`, `φ_j = 2πj/n_phi`.
///
/// The progressions cover `[0, 2π)`; the endpoint `2π` would repeat the
/// state at 0. The `θ` range covers the Bloch sphere twice, so the average
/// is not a Haar average.
pub fn input_state_grid(n_theta: usize, n_phi: usize) -> Result<Vec<CVector>> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::Domain("input grid needs at least one point per axis".into()));
    }
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = 2.0 * PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            out.push(input_state(theta, 2.0 * PI * j as f64 / n_phi as f64));
        }
    }
    Ok(out)
}

/// Grid sizes: the acceptance default and the flagged full grid.
pub const SUB_GRID: (usize, usize) = (20, 20);
pub const FULL_GRID: (usize, usize) = (100, 100);
/// Per-qubit grid used for two-qubit product states.
pub const TWO_QUBIT_GRID: (usize, usize) = (10, 10);

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Mean of `⟨ψ_out|Λ(|ψ⟩⟨ψ|)|ψ_out⟩` with `ψ_out = U ψ` over `states`.
pub fn grid_mean_fidelity(channel: &Channel, ideal: &CMatrix, states: &[CVector]) -> f64 {
    let values: Vec<f64> = states
        .par_iter()
        .map(|psi| {
            let out = ideal * psi;
            let rho = channel.apply(&(psi * psi.adjoint()));
            (out.adjoint() * rho * &out)[(0, 0)].re
        })
        .collect();
    pairwise_sum(&values) / values.len() as f64
}

/// Products `ψ_a ⊗ ψ_b` over a per-qubit grid.
pub fn product_grid(single: &[CVector]) -> Vec<CVector> {
    single.iter().flat_map(|a| single.iter().map(move |b| a.kronecker(b))).collect()
}

/// The gate a program is meant to realize, expressed in the lab frame.
pub fn ideal_lab_gate(program: &PulseProgram) -> CMatrix {
    let u = target_unitary(&program.target);
    to_lab_frame(&program.model(), &[program.duration], vec![u]).remove(0)
}

/// Grid-averaged output fidelity of a single-qubit program under decoherence.
pub fn averaged_open_fidelity(program: &PulseProgram, rates: &DecoherenceRates, grid: (usize, usize)) -> Result<f64> {
    let channel = master_channel(|t| lab_hamiltonian(program, t), 2, rates, program.duration, program.breakpoints(), &ToleranceConfig::default())?;
    let states = input_state_grid(grid.0, grid.1)?;
    Ok(grid_mean_fidelity(&channel, &ideal_lab_gate(program), &states))
}

/// Two-qubit version under the controlled Hamiltonian, scored against
/// `|e⟩⟨e| ⊗ 𝟙 + |g⟩⟨g| ⊗ U` on product states of a per-qubit grid.
pub fn averaged_open_fidelity_two_qubit(program: &PulseProgram, rates: &DecoherenceRates, per_qubit: (usize, usize)) -> Result<f64> {
    let channel =
        master_channel(|t| two_qubit_hamiltonian(program, t), 4, rates, program.duration, program.breakpoints(), &ToleranceConfig::default())?;
    let states = product_grid(&input_state_grid(per_qubit.0, per_qubit.1)?);
    let ideal = block_diag(&identity(2), &ideal_lab_gate(program));
    Ok(grid_mean_fidelity(&channel, &ideal, &states))
}

/// One row of a decoherence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceRow {
    pub gamma_over_2pi_hz: f64,
    pub protocol: ProtocolKind,
    pub k: u32,
    pub mean_infidelity: f64,
    pub n_states: usize,
}

/// Mean infidelity versus `γ/2π = γ_φ/2π` for each `(protocol, k)` entry
/// with gate time `kπ/ω`.
pub fn decoherence_sweep(
    preset: GatePreset,
    entries: &[(ProtocolKind, u32)],
    rates_hz: &[f64],
    units: &PhysicalUnits,
    grid: (usize, usize),
) -> Result<Vec<DecoherenceRow>> {
    let target = preset.target().resolved()?;
    let programs = entries
        .iter()
        .map(|&(kind, k)| synthesize_protocol(kind, &target, f64::from(k) * PI, 1.0, DEFAULT_SAMPLES))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..entries.len()).flat_map(|e| rates_hz.iter().map(move |&r| (e, r))).collect();
    jobs.par_iter()
        .map(|&(e, hz)| {
            let rates = units.equal_rates(hz);
            let (f, n) = if preset.is_two_qubit() {
                let n = TWO_QUBIT_GRID.0 * TWO_QUBIT_GRID.1;
                (averaged_open_fidelity_two_qubit(&programs[e], &rates, TWO_QUBIT_GRID)?, n * n)
            } else {
                (averaged_open_fidelity(&programs[e], &rates, grid)?, grid.0 * grid.1)
            };
            Ok(DecoherenceRow { gamma_over_2pi_hz: hz, protocol: entries[e].0, k: entries[e].1, mean_infidelity: 1.0 - f, n_states: n })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatesim::{exact_lab_propagator, two_qubit_exact_propagators};
    use crate::numerics::linalg::{sigma_x, zeros};
    use crate::numerics::propagate_unitary;
    use crate::pulse_synthesis::synthesize;
    use proptest::prelude::*;

    fn ket(e: f64, g: f64) -> CVector {
        CVector::from_vec(vec![c(e, 0.0), c(g, 0.0)])
    }

    fn rates(g: f64, gp: f64) -> DecoherenceRates {
        DecoherenceRates::new(g, gp).unwrap()
    }

    #[test]
    fn rhs_without_dissipation_is_commutator() {
        let h = sigma_x() * c(0.3, 0.0) + sigma_z() * c(0.1, 0.0);
        let rho = DensityMatrix::from_pure(&input_state(0.4, 1.1)).into_matrix();
        let d = lindblad_rhs(&rho, &h, &DecoherenceRates::default()).unwrap();
        assert!(max_abs(&(d - (&h * &rho - &rho * &h) * (-I))) < 1e-16);
    }

    #[test]
    fn excited_state_decays_at_gamma() {
        let rho = DensityMatrix::from_pure(&ket(1.0, 0.0)).into_matrix();
        let d = lindblad_rhs(&rho, &zeros(2), &rates(0.37, 0.2)).unwrap();
        assert!((d[(0, 0)] - c(-0.37, 0.0)).norm() < 1e-16);
        assert!((d[(1, 1)] - c(0.37, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn rhs_rejects_mismatched_dimensions() {
        assert!(lindblad_rhs(&zeros(2), &zeros(4), &DecoherenceRates::default()).is_err());
        assert!(lindblad_rhs(&zeros(3), &zeros(3), &DecoherenceRates::default()).is_err());
        assert!(DecoherenceRates::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn coherence_decay_matches_analytic_rate() {
        let (g, gp) = (0.05, 0.02);
        let rho0 = DensityMatrix::from_pure(&input_state(std::f64::consts::FRAC_PI_4, 0.0));
        let times: Vec<f64> = (1..=10).map(|k| f64::from(k)).collect();
        let out = evolve_master_at(&rho0, |_| zeros(2), &rates(g, gp), &times, &[], &ToleranceConfig::default()).unwrap();
        for (t, rho) in times.iter().zip(&out) {
            let want = 0.5 * (-(0.5 * g + 2.0 * gp) * t).exp();
            assert!((rho.matrix()[(0, 1)].norm() - want).abs() < 1e-8);
            let pe = 0.5 * (-g * t).exp();
            assert!((rho.matrix()[(0, 0)].re - pe).abs() < 1e-8);
        }
    }

    #[test]
    fn ground_state_is_stationary_and_excited_relaxes() {
        let tol = ToleranceConfig::default();
        let g = DensityMatrix::from_pure(&ket(0.0, 1.0));
        let out = evolve_master(&g, |_| zeros(2), &rates(0.3, 0.1), 20.0, &[], &tol).unwrap();
        assert!(max_abs(&(out.matrix() - g.matrix())) < 1e-14);
        let e = DensityMatrix::from_pure(&ket(1.0, 0.0));
        let out = evolve_master(&e, |_| zeros(2), &rates(0.5, 0.1), 60.0, &[], &tol).unwrap();
        assert!(max_abs(&(out.matrix() - g.matrix())) < 1e-12);
    }

    #[test]
    fn pure_dephasing_decreases_purity_monotonically() {
        let rho0 = DensityMatrix::from_pure(&input_state(0.3, 0.9));
        let times: Vec<f64> = (1..=40).map(|k| 0.5 * f64::from(k)).collect();
        let h = |t: f64| sigma_x() * c(0.2 * t.cos(), 0.0);
        let out = evolve_master_at(&rho0, h, &rates(0.0, 0.03), &times, &[], &ToleranceConfig::default()).unwrap();
        let mut last = rho0.purity();
        for rho in &out {
            let p = rho.purity();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn closed_system_limit_matches_unitary_conjugation() {
        let p = synthesize(&GatePreset::Hadamard.target(), 6.0 * PI, 1.0, 4000).unwrap();
        let u = exact_lab_propagator(&p, p.duration).unwrap();
        let psi = input_state(0.7, 2.1);
        let rho0 = DensityMatrix::from_pure(&psi);
        let tol = ToleranceConfig::default();
        let rho = evolve_master(&rho0, |t| lab_hamiltonian(&p, t), &DecoherenceRates::default(), p.duration, &p.times, &tol).unwrap();
        let want = &u * rho0.matrix() * u.adjoint();
        assert!(max_abs(&(rho.matrix() - &want)) < 1e-7);
        let ch = master_channel(|t| lab_hamiltonian(&p, t), 2, &DecoherenceRates::default(), p.duration, &p.times, &tol).unwrap();
        assert!(max_abs(&(ch.apply(rho0.matrix()) - want)) < 1e-7);
    }

    #[test]
    fn channel_agrees_with_direct_evolution() {
        let p = synthesize(&GatePreset::Not.target(), 5.0 * PI, 1.0, 2000).unwrap();
        let r = rates(1e-3, 2e-3);
        let tol = ToleranceConfig::default();
        let ch = master_channel(|t| lab_hamiltonian(&p, t), 2, &r, p.duration, &p.times, &tol).unwrap();
        for (th, ph) in [(0.0, 0.0), (0.4, 1.0), (2.0, 4.0)] {
            let rho0 = DensityMatrix::from_pure(&input_state(th, ph));
            let direct = evolve_master(&rho0, |t| lab_hamiltonian(&p, t), &r, p.duration, &p.times, &tol).unwrap();
            assert!(max_abs(&(ch.apply(rho0.matrix()) - direct.matrix())) < 1e-9);
        }
    }

    #[test]
    fn two_qubit_closed_limit_and_block_structure() {
        let p = synthesize(&GatePreset::CnotLike.target(), 5.0 * PI, 1.0, 2000).unwrap();
        let tol = ToleranceConfig::default();
        let ch = master_channel(|t| two_qubit_hamiltonian(&p, t), 4, &DecoherenceRates::default(), p.duration, &p.times, &tol).unwrap();
        let u = two_qubit_exact_propagators(&p, &[p.duration]).unwrap().remove(0);
        let psi = input_state(0.3, 0.2).kronecker(&input_state(1.2, 2.5));
        let rho = &psi * psi.adjoint();
        assert!(max_abs(&(ch.apply(&rho) - &u * &rho * u.adjoint())) < 1e-7);
    }

    #[test]
    fn two_qubit_dissipators_act_independently() {
        let r = rates(0.2, 0.0);
        // |e⟩|e⟩ loses population to |e⟩|g⟩ and |g⟩|e⟩ at γ each.
        let mut rho = zeros(4);
        rho[(0, 0)] = c(1.0, 0.0);
        let d = lindblad_rhs(&rho, &zeros(4), &r).unwrap();
        assert!((d[(0, 0)].re + 0.4).abs() < 1e-15);
        assert!((d[(1, 1)].re - 0.2).abs() < 1e-15 && (d[(2, 2)].re - 0.2).abs() < 1e-15);
    }

    #[test]
    fn grid_contract() {
        let one = input_state_grid(1, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert!((&one[0] - ket(0.0, 1.0)).norm() < 1e-16);
        assert_eq!(input_state_grid(100, 100).unwrap().len(), 10_000);
        assert!(input_state_grid(0, 3).is_err());
        for s in input_state_grid(7, 5).unwrap() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(product_grid(&input_state_grid(10, 10).unwrap()).len(), 10_000);
    }

    #[test]
    fn noiseless_chrw_hadamard_grid_fidelity() {
        let p = synthesize(&GatePreset::Hadamard.target(), 6.0 * PI, 1.0, 4000).unwrap();
        let f = averaged_open_fidelity(&p, &DecoherenceRates::default(), SUB_GRID).unwrap();
        assert!(f >= 0.9999, "{f}");
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(identity(2) * c(0.5, 0.0)).is_ok());
        assert!(DensityMatrix::new(identity(2)).is_err());
        let mut bad = identity(2) * c(0.5, 0.0);
        bad[(0, 1)] = c(0.9, 0.0);
        bad[(1, 0)] = c(0.9, 0.0);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::Positivity(_))));
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|k| 1.0 / f64::from(k + 1)).collect();
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn unit_conversion() {
        let u = PhysicalUnits::default();
        let r = u.equal_rates(25e3);
        assert!((r.gamma - 5e-6).abs() < 1e-20 && r.gamma == r.gamma_phi);
        assert!((u.seconds(6.0 * PI) - 0.6e-9).abs() < 1e-20);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn evolution_preserves_density_matrix_properties(
            th in 0.0..PI, ph in 0.0..(2.0 * PI), g in 0.0..0.2f64, gp in 0.0..0.2f64, a in -1.0..1.0f64,
        ) {
            let rho0 = DensityMatrix::from_pure(&input_state(th, ph));
            let h = |t: f64| sigma_x() * c(a * (1.3 * t).cos(), 0.0) + sigma_z() * c(0.5, 0.0);
            let times: Vec<f64> = (1..=6).map(|k| f64::from(k)).collect();
            let out = evolve_master_at(&rho0, h, &rates(g, gp), &times, &[], &ToleranceConfig::default()).unwrap();
            for rho in out {
                prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
                prop_assert!(max_abs(&(rho.matrix() - rho.matrix().adjoint())) <= 1e-10);
                prop_assert!(min_eigenvalue(rho.matrix()) >= -1e-8);
            }
        }

        #[test]
        fn rhs_is_trace_free(th in 0.0..PI, ph in 0.0..(2.0 * PI), g in 0.0..1.0f64, gp in 0.0..1.0f64, a in -2.0..2.0f64) {
            let rho = DensityMatrix::from_pure(&input_state(th, ph)).into_matrix();
            let h = sigma_x() * c(a, 0.0) + sigma_z() * c(0.3, 0.0);
            prop_assert!(lindblad_rhs(&rho, &h, &rates(g, gp)).unwrap().trace().norm() <= 1e-14);
            let rho2 = kron(&rho, &rho);
            let h2 = kron(&h, &identity(2));
            prop_assert!(lindblad_rhs(&rho2, &h2, &rates(g, gp)).unwrap().trace().norm() <= 1e-14);
        }

        #[test]
        fn liouvillian_matches_rhs(th in 0.0..PI, ph in 0.0..(2.0 * PI), g in 0.0..1.0f64, gp in 0.0..1.0f64) {
            let rho = DensityMatrix::from_pure(&input_state(th, ph)).into_matrix();
            let h = sigma_x() * c(0.4, 0.0) + sigma_z() * c(-0.2, 0.0);
            let r = rates(g, gp);
            let l = liouvillian(&h, &jump_operators(&r, 2).unwrap());
            let via = unvectorize(&(l * vectorize(&rho)), 2);
            prop_assert!(max_abs(&(via - lindblad_rhs(&rho, &h, &r).unwrap())) <= 1e-14);
        }
    }

    #[test]
    fn unitary_propagation_reference_is_consistent() {
        let h = |t: f64| sigma_x() * c(0.3 * t.sin(), 0.0);
        let u = propagate_unitary(h, 0.0, 4.0, &[], &ToleranceConfig::default()).unwrap();
        let ch = master_channel(h, 2, &DecoherenceRates::default(), 4.0, &[], &ToleranceConfig::default()).unwrap();
        let rho = DensityMatrix::from_pure(&input_state(1.0, 0.5)).into_matrix();
        assert!(max_abs(&(ch.apply(&rho) - &u * &rho * u.adjoint())) < 1e-9);
    }
}
