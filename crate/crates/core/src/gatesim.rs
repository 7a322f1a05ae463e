// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact versus effective dynamics, gate fidelities and gate-time scans.
//!
//! Effective propagators are always mapped back to the lab frame before they
//! are compared with the exact lab propagator:
//! `U_lab(t) = S†(t) R†(t) U_model(t) S(0)` where `S = 𝟙` for the
//! rotating-frame models.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{
    effective_hamiltonian, generator_s, lab_hamiltonian, rotating_frame, DriveTone, EffectivePoint,
    LabSnapshot, LabSystem, ProtocolKind, ProtocolModel,
};
use crate::numerics::linalg::{block_diag, c, identity, max_abs, zeros, CMatrix};
use crate::numerics::{bessel_j, find_root, propagate_unitary_at, ToleranceConfig};
use crate::pulse_synthesis::{synthesize_protocol, GatePreset, GateTarget, PulseProgram, DEFAULT_SAMPLES};

/// Exact lab propagators `U_act(t_k, 0)`.
pub fn exact_lab_propagators<S: LabSystem + ?Sized>(sys: &S, times: &[f64]) -> Result<Vec<CMatrix>> {
    propagate_unitary_at(|t| lab_hamiltonian(sys, t), 0.0, times, sys.breakpoints(), &ToleranceConfig::default())
}

pub fn exact_lab_propagator<S: LabSystem + ?Sized>(sys: &S, t: f64) -> Result<CMatrix> {
    Ok(exact_lab_propagators(sys, &[t])?.remove(0))
}

/// Propagators of the model's own-frame Hamiltonian.
pub fn effective_frame_propagators<M: ProtocolModel + ?Sized>(model: &M, times: &[f64]) -> Result<Vec<CMatrix>> {
    propagate_unitary_at(
        |t| effective_hamiltonian(model, t),
        0.0,
        times,
        model.breakpoints(),
        &ToleranceConfig::default(),
    )
}

pub fn effective_frame_propagator<M: ProtocolModel + ?Sized>(model: &M, t: f64) -> Result<CMatrix> {
    Ok(effective_frame_propagators(model, &[t])?.remove(0))
}

fn frame_generator<M: ProtocolModel + ?Sized>(model: &M, t: f64) -> CMatrix {
    match model.kind() {
        ProtocolKind::Chrw => {
            let p = model.effective(t);
            generator_s(p.z, model.drive_frequency() * t + p.phase)
        }
        _ => identity(2),
    }
}

/// Maps own-frame propagators to the lab frame.
pub fn to_lab_frame<M: ProtocolModel + ?Sized>(model: &M, times: &[f64], frame: Vec<CMatrix>) -> Vec<CMatrix> {
    let s0 = frame_generator(model, 0.0);
    let omega = model.drive_frequency();
    times
        .iter()
        .zip(frame)
        .map(|(&t, u)| frame_generator(model, t).adjoint() * rotating_frame(omega, t).adjoint() * u * &s0)
        .collect()
}

/// Effective propagators expressed in the lab frame.
pub fn effective_lab_propagators<M: ProtocolModel + ?Sized>(model: &M, times: &[f64]) -> Result<Vec<CMatrix>> {
    let frame = effective_frame_propagators(model, times)?;
    Ok(to_lab_frame(model, times, frame))
}

pub fn effective_lab_propagator<M: ProtocolModel + ?Sized>(model: &M, t: f64) -> Result<CMatrix> {
    Ok(effective_lab_propagators(model, &[t])?.remove(0))
}

/// `F̄ = [Tr(MM†) + |Tr M|²]/(D² + D)` with `M = P U_eff† U_act P`.
///
/// `projector = None` means the full space.
pub fn gate_fidelity(u_eff: &CMatrix, u_act: &CMatrix, projector: Option<&CMatrix>, d: usize) -> Result<f64> {
    let mut m = u_eff.adjoint() * u_act;
    if let Some(p) = projector {
        if max_abs(&(p * p - p)) > 1e-12 {
            return Err(Error::Domain("subspace projector is not idempotent".into()));
        }
        m = p * m * p;
    }
    let d = d as f64;
    let tr_mm = (&m * m.adjoint()).trace().re;
    let tr = m.trace().norm_sqr();
    Ok((tr_mm + tr) / (d * d + d))
}

/// `F̄(t)` on a time grid together with its trapezoid time average.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub protocol: ProtocolKind,
    pub times: Vec<f64>,
    pub fbar: Vec<f64>,
    pub favg: f64,
}

/// Trapezoid average `(1/(t_N − t_0)) ∫ f dt` on a possibly non-uniform grid.
pub fn trapezoid_average(times: &[f64], values: &[f64]) -> f64 {
    if times.len() < 2 {
        return values.first().copied().unwrap_or(0.0);
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    integral / (times[times.len() - 1] - times[0])
}

/// Compares the model's lab-frame propagator with exact lab dynamics.
pub fn fidelity_trace<M, S>(model: &M, lab: &S, times: &[f64]) -> Result<FidelityTrace>
where
    M: ProtocolModel + ?Sized,
    S: LabSystem + ?Sized,
{
    let eff = effective_lab_propagators(model, times)?;
    let act = exact_lab_propagators(lab, times)?;
    let fbar = eff
        .iter()
        .zip(&act)
        .map(|(e, a)| gate_fidelity(e, a, None, 2))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityTrace { protocol: model.kind(), favg: trapezoid_average(times, &fbar), times: times.to_vec(), fbar })
}

/// Uniform grid of `n + 1` points over `[0, duration]`.
pub fn uniform_times(duration: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { duration } else { duration * i as f64 / n as f64 }).collect()
}

/// `|⟨g|U|g⟩|²`, the ground population after starting in `|g⟩`.
pub fn ground_population(u: &CMatrix) -> f64 {
    let last = u.nrows() - 1;
    u[(last, last)].norm_sqr()
}

/// Solves `ω_q J₁(Z) = Ω₀ − Zω/2` and `ω_q J₀(Z) = ω + Δ̃` for a constant drive.
///
/// The pair is reduced to the scalar equation
/// `(ω + Δ̃) J₁(Z)/J₀(Z) + Zω/2 − Ω₀ = 0`, which is increasing in `Z` on
/// `[0, 1.2]`, and solved by bracketing.
pub fn calibrate_constant_drive(omega0: f64, delta_target: f64, omega: f64) -> Result<(f64, f64)> {
    let base = omega + delta_target;
    if !(base > 0.0) || !(omega > 0.0) {
        return Err(Error::Validity(format!("ω + Δ̃ = {base} must be positive")));
    }
    if omega0 == 0.0 {
        return Ok((0.0, base));
    }
    let f = |z: f64| base * bessel_j(1, z).unwrap_or(f64::NAN) / bessel_j(0, z).unwrap_or(f64::NAN) + 0.5 * z * omega - omega0;
    let z = find_root(f, 0.0, crate::hamiltonians::Z_VALIDITY_MAX, 1e-15).map_err(|e| match e {
        Error::Bracket { .. } => Error::Validity(format!("constant drive Ω₀ = {omega0} needs Z > 1.2")),
        other => other,
    })?;
    Ok((z, base / bessel_j(0, z)?))
}

/// A constant-amplitude, constant-phase drive together with one effective
/// model of it.
///
/// Each protocol gets its own lab qubit frequency so that its effective
/// detuning equals the requested value: CHRW uses the calibrated `ω_q`,
/// the rotating-frame models use `ω + Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDrive {
    pub kind: ProtocolKind,
    pub omega: f64,
    pub lab: LabSnapshot,
    pub point: EffectivePoint,
}

impl ConstantDrive {
    pub fn new(kind: ProtocolKind, omega0: f64, delta: f64, omega: f64, phi0: f64) -> Result<Self> {
        let tone = |a: f64, p: f64| DriveTone { amplitude: a, phase: p };
        let (wq, point) = match kind {
            ProtocolKind::Chrw => {
                let (z, wq) = calibrate_constant_drive(omega0, delta, omega)?;
                let point = EffectivePoint {
                    detuning: wq * bessel_j(0, z)? - omega,
                    amplitude: wq * bessel_j(1, z)?,
                    phase: phi0,
                    bs_shift: 0.0,
                    z,
                };
                (wq, point)
            }
            ProtocolKind::Rwa | ProtocolKind::RwaBs => {
                let point = EffectivePoint {
                    detuning: delta,
                    amplitude: 0.5 * omega0,
                    phase: phi0,
                    bs_shift: omega0 * omega0 / (8.0 * omega),
                    z: 0.0,
                };
                (omega + delta, point)
            }
        };
        Ok(Self {
            kind,
            omega,
            lab: LabSnapshot { qubit_frequency: wq, tones: [tone(omega0, phi0), tone(0.0, phi0 - std::f64::consts::FRAC_PI_2)] },
            point,
        })
    }
}

impl LabSystem for ConstantDrive {
    fn drive_frequency(&self) -> f64 {
        self.omega
    }
    fn snapshot(&self, _t: f64) -> LabSnapshot {
        self.lab
    }
}

impl ProtocolModel for ConstantDrive {
    fn kind(&self) -> ProtocolKind {
        self.kind
    }
    fn drive_frequency(&self) -> f64 {
        self.omega
    }
    fn effective(&self, _t: f64) -> EffectivePoint {
        self.point
    }
}

/// Ground-population traces `(exact, effective)` for a constant drive.
pub fn population_traces(drive: &ConstantDrive, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let act = exact_lab_propagators(drive, times)?;
    let eff = effective_lab_propagators(drive, times)?;
    Ok((act.iter().map(ground_population).collect(), eff.iter().map(ground_population).collect()))
}

/// `1 − 𝓕` of a constant drive: one minus the time average of `F̄(t)` over
/// `points + 1` uniform samples of `[0, duration]`.
pub fn constant_drive_average_infidelity(
    kind: ProtocolKind,
    omega0: f64,
    delta: f64,
    omega: f64,
    duration: f64,
    points: usize,
) -> Result<f64> {
    let drive = ConstantDrive::new(kind, omega0, delta, omega, 0.0)?;
    let times = uniform_times(duration, points);
    Ok(1.0 - fidelity_trace(&drive, &drive, &times)?.favg)
}

/// `F̄(T)` of a single-qubit program against its own effective model.
pub fn program_gate_fidelity(program: &PulseProgram) -> Result<f64> {
    let t = program.duration;
    let eff = effective_lab_propagator(&program.model(), t)?;
    let act = exact_lab_propagator(program, t)?;
    gate_fidelity(&eff, &act, None, 2)
}

/// `F̄(T)` for `preset` realized with `kind` at `T = kπ/ω` (ω = 1).
///
/// A program that cannot be synthesized within the model's validity range
/// scores zero.
pub fn final_gate_fidelity(kind: ProtocolKind, preset: GatePreset, target: &GateTarget, k: u32, samples: usize) -> Result<f64> {
    let duration = f64::from(k) * std::f64::consts::PI;
    let program = match synthesize_protocol(kind, target, duration, 1.0, samples) {
        Ok(p) => p,
        Err(Error::Validity(msg)) => {
            log::debug!("{kind} {preset} k={k} not realizable: {msg}");
            return Ok(0.0);
        }
        Err(e) => return Err(e),
    };
    if preset.is_two_qubit() {
        two_qubit_gate(&program).map(|tr| *tr.fbar.last().expect("final sample"))
    } else {
        program_gate_fidelity(&program)
    }
}

/// Settings for [`shortest_gate_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub k_max: u32,
    /// Number of consecutive larger `k` that must also pass.
    pub confirm: u32,
    pub samples: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { k_max: 60, confirm: 2, samples: DEFAULT_SAMPLES }
    }
}

/// Result of a gate-time scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTimeScan {
    pub kind: ProtocolKind,
    pub preset: GatePreset,
    /// `(k, F̄(kπ/ω))` for every scanned `k`.
    pub fidelities: Vec<(u32, f64)>,
    /// Smallest `k` whose fidelity and that of the next `confirm` values all
    /// reach the floor.
    pub shortest: Option<u32>,
}

/// Scans `k = 1..=k_max` for the shortest gate time `kπ/ω` reaching `floor`.
///
/// The fidelity of a given protocol is not monotone in `k`; isolated passes
/// followed by failures are not counted, so a `k` qualifies only if the next
/// `confirm` values also pass (values beyond `k_max` are evaluated as needed).
pub fn shortest_gate_time(kind: ProtocolKind, preset: GatePreset, floor: f64, cfg: &ScanConfig) -> Result<GateTimeScan> {
    let target = preset.target().resolved()?;
    let ks: Vec<u32> = (1..=cfg.k_max + cfg.confirm).collect();
    let fids = ks
        .par_iter()
        .map(|&k| final_gate_fidelity(kind, preset, &target, k, cfg.samples).map(|f| (k, f)))
        .collect::<Result<Vec<_>>>()?;
    let pass: Vec<bool> = fids.iter().map(|&(_, f)| f >= floor).collect();
    let shortest = (0..cfg.k_max as usize)
        .find(|&i| pass[i..=i + cfg.confirm as usize].iter().all(|&p| p))
        .map(|i| fids[i].0);
    let fidelities = fids.into_iter().take(cfg.k_max as usize).collect();
    Ok(GateTimeScan { kind, preset, fidelities, shortest })
}

/// `H̃(t) = ½(𝟙 − σ_z)ᶜ ⊗ H(t)`: the target Hamiltonian acts only when the
/// control is in `|g⟩` (second block in `(|e⟩, |g⟩)` order).
pub fn two_qubit_hamiltonian<S: LabSystem + ?Sized>(lab: &S, t: f64) -> CMatrix {
    block_diag(&zeros(2), &lab_hamiltonian(lab, t))
}

/// Exact 4×4 propagation of [`two_qubit_hamiltonian`] versus
/// `Ũ_eff = ½(𝟙 + σ_z) ⊗ 𝟙 + ½(𝟙 − σ_z) ⊗ U_eff`, scored with `D = 4`.
pub fn two_qubit_gate(program: &PulseProgram) -> Result<FidelityTrace> {
    two_qubit_gate_at(program, &[program.duration])
}

pub fn two_qubit_gate_at(program: &PulseProgram, times: &[f64]) -> Result<FidelityTrace> {
    let model = program.model();
    let eff = effective_lab_propagators(&model, times)?;
    let act = two_qubit_exact_propagators(program, times)?;
    let fbar = eff
        .iter()
        .zip(&act)
        .map(|(e, a)| gate_fidelity(&block_diag(&identity(2), e), a, None, 4))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityTrace { protocol: model.kind, favg: trapezoid_average(times, &fbar), times: times.to_vec(), fbar })
}

pub fn two_qubit_exact_propagators<S: LabSystem + ?Sized>(lab: &S, times: &[f64]) -> Result<Vec<CMatrix>> {
    propagate_unitary_at(|t| two_qubit_hamiltonian(lab, t), 0.0, times, lab.breakpoints(), &ToleranceConfig::default())
}

/// Third level `|f⟩` above the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageSystem {
    /// `ω₂`, frequency of `|f⟩` measured from `|g⟩`.
    pub omega2: f64,
    /// Drive matrix element `|e⟩↔|f⟩` relative to `|g⟩↔|e⟩`.
    pub coupling_ratio: f64,
}

impl LeakageSystem {
    pub const DEFAULT_COUPLING: f64 = std::f64::consts::SQRT_2;

    /// `ω₂ = ω_q(0) + gap`.
    pub fn above(program: &PulseProgram, gap: f64, coupling_ratio: f64) -> Self {
        Self { omega2: program.omega_q[0] + gap, coupling_ratio }
    }
}

/// Three-level lab Hamiltonian in `(|e⟩, |g⟩, |f⟩)` order, energies
/// `(ω_q/2, −ω_q/2, ω₂ − ω_q/2)` so that `|f⟩` sits `ω₂` above `|g⟩`.
pub fn three_level_hamiltonian<S: LabSystem + ?Sized>(lab: &S, leak: &LeakageSystem, t: f64) -> CMatrix {
    let snap = lab.snapshot(t);
    let omega = lab.drive_frequency();
    let drive: f64 = snap.tones.iter().map(|x| x.amplitude * (omega * t + x.phase).cos()).sum();
    let half = 0.5 * snap.qubit_frequency;
    let mut h = zeros(3);
    h[(0, 0)] = c(half, 0.0);
    h[(1, 1)] = c(-half, 0.0);
    h[(2, 2)] = c(leak.omega2 - half, 0.0);
    h[(0, 1)] = c(drive, 0.0);
    h[(1, 0)] = c(drive, 0.0);
    h[(0, 2)] = c(drive * leak.coupling_ratio, 0.0);
    h[(2, 0)] = c(drive * leak.coupling_ratio, 0.0);
    h
}

/// `1 − F̄(T)` on the qubit subspace (`D = 2`) with the third level present.
pub fn three_level_infidelity(program: &PulseProgram, leak: &LeakageSystem) -> Result<f64> {
    let max_wq = program.omega_q.iter().copied().fold(f64::MIN, f64::max);
    if !(leak.omega2 > max_wq) {
        return Err(Error::Domain(format!("ω₂ = {} must exceed ω_q (max {max_wq})", leak.omega2)));
    }
    let t = program.duration;
    let act = propagate_unitary_at(
        |s| three_level_hamiltonian(program, leak, s),
        0.0,
        &[t],
        program.breakpoints(),
        &ToleranceConfig::default(),
    )?
    .remove(0);
    let eff = block_diag(&effective_lab_propagator(&program.model(), t)?, &identity(1));
    let mut p = zeros(3);
    p[(0, 0)] = c(1.0, 0.0);
    p[(1, 1)] = c(1.0, 0.0);
    Ok(1.0 - gate_fidelity(&eff, &act, Some(&p), 2)?)
}
