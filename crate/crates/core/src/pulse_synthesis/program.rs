// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use super::path::{required_controls, schedule, solve_z_wq, GateTarget};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    DriveTone, EffectivePoint, LabSnapshot, LabSystem, ProtocolKind, ProtocolModel,
};

pub const DEFAULT_SAMPLES: usize = 4000;
pub const MIN_SAMPLES: usize = 2000;

/// Sampled lab waveforms for one gate, linearly interpolated between samples.
///
/// `delta_eff` and `omega_eff` hold the designed effective detuning and
/// coupling (Δ̃_q, Ω̃₀); the remaining arrays describe the lab drive.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseProgram {
    pub protocol: ProtocolKind,
    pub omega: f64,
    pub duration: f64,
    pub target: GateTarget,
    pub times: Vec<f64>,
    pub omega0: Vec<f64>,
    pub omega1: Vec<f64>,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub omega_q: Vec<f64>,
    pub z: Vec<f64>,
    pub delta_eff: Vec<f64>,
    pub omega_eff: Vec<f64>,
}

/// Derivative of uniformly sampled data: central differences inside,
/// second-order one-sided differences at the ends.
fn gradient(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        return out;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    }
    out
}

fn unwrap_phase(phases: &mut [f64]) {
    for i in 1..phases.len() {
        let mut d = phases[i] - phases[i - 1];
        while d > PI {
            phases[i] -= 2.0 * PI;
            d -= 2.0 * PI;
        }
        while d < -PI {
            phases[i] += 2.0 * PI;
            d += 2.0 * PI;
        }
    }
}

/// Fills undefined phases (zero coupling) from the nearest defined sample.
fn continue_phase(raw: &[Option<f64>]) -> Vec<f64> {
    let defined: Vec<usize> = raw.iter().enumerate().filter_map(|(i, p)| p.map(|_| i)).collect();
    if defined.is_empty() {
        return vec![0.0; raw.len()];
    }
    let mut out = Vec::with_capacity(raw.len());
    let mut k = 0;
    for i in 0..raw.len() {
        while k + 1 < defined.len() && (defined[k + 1] as isize - i as isize).abs() <= (defined[k] as isize - i as isize).abs() {
            k += 1;
        }
        out.push(raw[defined[k]].expect("defined index"));
    }
    out
}

fn check_grid(duration: f64, omega: f64, samples: usize) -> Result<()> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("carrier frequency {omega} must be positive")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!("sample count {samples} below {MIN_SAMPLES}")));
    }
    let k = duration * omega / PI;
    if !(k >= 0.5) || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::Domain(format!(
            "gate time must be an integer multiple of π/ω (got {k} π/ω)"
        )));
    }
    Ok(())
}

/// CHRW program realizing `target` in time `duration` with `samples`
/// intervals.
pub fn synthesize(target: &GateTarget, duration: f64, omega: f64, samples: usize) -> Result<PulseProgram> {
    synthesize_protocol(ProtocolKind::Chrw, target, duration, omega, samples)
}

/// Program designed with the given effective model.
///
/// * CHRW: `Z`, `ω_q` from the Bessel relations, `Ω₀ = Ω̃₀ + (Z/2)(ω + φ̇₀)`,
///   `Ω₁ = Ż/2`.
/// * RWA: `ω_q = ω + Δ̃`, `Ω₀ = 2Ω̃₀`, `Ω₁ = 0`.
/// * RWA-BS: as RWA with `ω_q` lowered by `Ω₀²/(4ω)` so that the
///   Bloch–Siegert shift is cancelled.
pub fn synthesize_protocol(
    kind: ProtocolKind,
    target: &GateTarget,
    duration: f64,
    omega: f64,
    samples: usize,
) -> Result<PulseProgram> {
    check_grid(duration, omega, samples)?;
    let target = target.resolved()?;
    let dt = duration / samples as f64;
    let times: Vec<f64> = (0..=samples).map(|i| if i == samples { duration } else { i as f64 * dt }).collect();

    let mut delta_eff = Vec::with_capacity(times.len());
    let mut omega_eff = Vec::with_capacity(times.len());
    let mut raw_phase = Vec::with_capacity(times.len());
    for &t in &times {
        let c = required_controls(&schedule(&target, duration, t)?);
        delta_eff.push(c.detuning);
        omega_eff.push(c.amplitude);
        raw_phase.push(c.phase);
    }
    let peak = omega_eff.iter().copied().fold(0.0, f64::max);
    for (p, &a) in raw_phase.iter_mut().zip(&omega_eff) {
        if a <= 1e-12 * peak {
            *p = None;
        }
    }
    let mut phi0 = continue_phase(&raw_phase);
    unwrap_phase(&mut phi0);
    let phi1: Vec<f64> = phi0.iter().map(|p| p - FRAC_PI_2).collect();
    let n = times.len();

    let (omega0, omega1, omega_q, z) = match kind {
        ProtocolKind::Chrw => {
            let mut z = Vec::with_capacity(n);
            let mut wq = Vec::with_capacity(n);
            for i in 0..n {
                let (zi, wi) = solve_z_wq(omega_eff[i], delta_eff[i], omega).map_err(|e| match e {
                    Error::Validity(msg) => Error::Validity(format!("t = {:.6}: {msg}", times[i])),
                    other => other,
                })?;
                z.push(zi);
                wq.push(wi);
            }
            let phi_dot = gradient(&phi0, dt);
            let z_dot = gradient(&z, dt);
            let omega0 = (0..n).map(|i| omega_eff[i] + 0.5 * z[i] * (omega + phi_dot[i])).collect();
            let omega1 = z_dot.iter().map(|d| 0.5 * d).collect();
            (omega0, omega1, wq, z)
        }
        ProtocolKind::Rwa | ProtocolKind::RwaBs => {
            let omega0: Vec<f64> = omega_eff.iter().map(|a| 2.0 * a).collect();
            let wq = (0..n)
                .map(|i| {
                    let bs = if kind == ProtocolKind::RwaBs { omega0[i] * omega0[i] / (4.0 * omega) } else { 0.0 };
                    omega + delta_eff[i] - bs
                })
                .collect();
            (omega0, vec![0.0; n], wq, vec![0.0; n])
        }
    };

    Ok(PulseProgram {
        protocol: kind,
        omega,
        duration,
        target,
        times,
        omega0,
        omega1,
        phi0,
        phi1,
        omega_q,
        z,
        delta_eff,
        omega_eff,
    })
}

/// Interval index and weight of the right endpoint.
#[derive(Debug, Clone, Copy)]
struct Locator {
    i: usize,
    w: f64,
}

impl PulseProgram {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn locate(&self, t: f64) -> Locator {
        let n = self.times.len();
        if n < 2 || t <= self.times[0] {
            return Locator { i: 0, w: 0.0 };
        }
        if t >= self.times[n - 1] {
            return Locator { i: n - 2, w: 1.0 };
        }
        let j = self.times.partition_point(|&s| s <= t);
        let i = j - 1;
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        Locator { i, w }
    }

    fn lerp(values: &[f64], loc: Locator) -> f64 {
        if values.len() < 2 {
            return values.first().copied().unwrap_or(0.0);
        }
        values[loc.i] + loc.w * (values[loc.i + 1] - values[loc.i])
    }

    /// Lab snapshot at `t`, clamped to the program interval.
    pub fn snapshot_at(&self, t: f64) -> LabSnapshot {
        let loc = self.locate(t);
        LabSnapshot {
            qubit_frequency: Self::lerp(&self.omega_q, loc),
            tones: [
                DriveTone { amplitude: Self::lerp(&self.omega0, loc), phase: Self::lerp(&self.phi0, loc) },
                DriveTone { amplitude: Self::lerp(&self.omega1, loc), phase: Self::lerp(&self.phi1, loc) },
            ],
        }
    }

    pub fn z_at(&self, t: f64) -> f64 {
        Self::lerp(&self.z, self.locate(t))
    }

    pub fn phi0_at(&self, t: f64) -> f64 {
        Self::lerp(&self.phi0, self.locate(t))
    }

    /// Designed `(Δ̃_q, Ω̃₀, φ₀, Z)` at `t`.
    pub fn design_at(&self, t: f64) -> EffectivePoint {
        let loc = self.locate(t);
        EffectivePoint {
            detuning: Self::lerp(&self.delta_eff, loc),
            amplitude: Self::lerp(&self.omega_eff, loc),
            phase: Self::lerp(&self.phi0, loc),
            bs_shift: 0.0,
            z: Self::lerp(&self.z, loc),
        }
    }

    pub fn peak_omega0(&self) -> f64 {
        self.omega0.iter().copied().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn peak_omega_eff(&self) -> f64 {
        self.omega_eff.iter().copied().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Effective model of the kind this program was designed for.
    pub fn model(&self) -> ProgramModel<'_> {
        self.model_as(self.protocol)
    }

    /// Effective model of an arbitrary kind evaluated on this program.
    pub fn model_as(&self, kind: ProtocolKind) -> ProgramModel<'_> {
        ProgramModel { program: self, kind }
    }

    /// Checks the structural relations between the sampled waveforms.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.times.len();
        let arrays = [
            &self.omega0, &self.omega1, &self.phi0, &self.phi1, &self.omega_q, &self.z, &self.delta_eff, &self.omega_eff,
        ];
        if n < 3 || arrays.iter().any(|a| a.len() != n) {
            return Err(Error::Domain("program arrays have inconsistent lengths".into()));
        }
        if self.z[0].abs() > 1e-12 || self.z[n - 1].abs() > 1e-12 {
            return Err(Error::Validity(format!("Z(0) = {}, Z(T) = {} must vanish", self.z[0], self.z[n - 1])));
        }
        for i in 0..n {
            if (self.phi1[i] - self.phi0[i] + FRAC_PI_2).abs() > 1e-12 {
                return Err(Error::Validity(format!("φ₁ ≠ φ₀ − π/2 at sample {i}")));
            }
        }
        if self.protocol == ProtocolKind::Chrw {
            let dt = self.duration / (n - 1) as f64;
            let zd = gradient(&self.z, dt);
            for i in 0..n {
                if (self.omega1[i] - 0.5 * zd[i]).abs() > 1e-6 * self.omega {
                    return Err(Error::Validity(format!("Ω₁ ≠ Ż/2 at sample {i}")));
                }
            }
        }
        Ok(())
    }
}

impl LabSystem for PulseProgram {
    fn drive_frequency(&self) -> f64 {
        self.omega
    }
    fn snapshot(&self, t: f64) -> LabSnapshot {
        self.snapshot_at(t)
    }
    fn breakpoints(&self) -> &[f64] {
        &self.times
    }
}

/// A [`PulseProgram`] viewed through one effective model.
///
/// The CHRW view uses the designed effective coefficients. The rotating-frame
/// views are derived from the lab waveforms: detuning `ω_q − ω`, coupling
/// `Σ_n (Ω_n/2) e^{iφ_n}` and Bloch–Siegert shift `Σ_n Ω_n²/(8ω)`.
#[derive(Debug, Clone, Copy)]
pub struct ProgramModel<'a> {
    pub program: &'a PulseProgram,
    pub kind: ProtocolKind,
}

impl ProtocolModel for ProgramModel<'_> {
    fn kind(&self) -> ProtocolKind {
        self.kind
    }
    fn drive_frequency(&self) -> f64 {
        self.program.omega
    }
    fn effective(&self, t: f64) -> EffectivePoint {
        match self.kind {
            ProtocolKind::Chrw => self.program.design_at(t),
            ProtocolKind::Rwa | ProtocolKind::RwaBs => {
                let snap = self.program.snapshot_at(t);
                let omega = self.program.omega;
                let (mut re, mut im) = (0.0, 0.0);
                for tone in &snap.tones {
                    re += 0.5 * tone.amplitude * tone.phase.cos();
                    im += 0.5 * tone.amplitude * tone.phase.sin();
                }
                EffectivePoint {
                    detuning: snap.qubit_frequency - omega,
                    amplitude: re.hypot(im),
                    phase: im.atan2(re),
                    bs_shift: crate::hamiltonians::bs_shift(&snap.tones, omega),
                    z: 0.0,
                }
            }
        }
    }
    fn breakpoints(&self) -> &[f64] {
        &self.program.times
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse_synthesis::path::GatePreset;

    #[test]
    fn hadamard_peak_drive_at_five_pi() {
        let p = synthesize(&GatePreset::Hadamard.target(), 5.0 * PI, 1.0, 4000).unwrap();
        let peak = p.peak_omega0();
        assert!((peak / 0.15 - 1.0).abs() <= 0.2, "peak Ω₀ = {peak}, effective peak {}", p.peak_omega_eff());
    }

    #[test]
    fn gradient_is_exact_for_quadratics() {
        let dt = 0.1;
        let v: Vec<f64> = (0..20).map(|i| (i as f64 * dt).powi(2) * 3.0 - 1.0).collect();
        let g = gradient(&v, dt);
        for (i, d) in g.iter().enumerate() {
            assert!((d - 6.0 * i as f64 * dt).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_continuation_uses_nearest_defined() {
        let raw = [None, None, Some(1.0), Some(2.0), None];
        assert_eq!(continue_phase(&raw), vec![1.0, 1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let mut p = vec![3.0, -3.1, -2.9, 3.0];
        unwrap_phase(&mut p);
        for w in p.windows(2) {
            assert!((w[1] - w[0]).abs() < PI);
        }
    }

    #[test]
    fn rejects_non_integer_gate_time() {
        let t = GatePreset::Hadamard.target();
        assert!(synthesize(&t, 5.5 * PI, 1.0, 4000).is_err());
        assert!(synthesize(&t, 5.0 * PI, 1.0, 100).is_err());
    }

    #[test]
    fn chrw_program_invariants() {
        for preset in [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi] {
            let p = synthesize(&preset.target(), 6.0 * PI, 1.0, 4000).unwrap();
            p.check_invariants().unwrap();
            assert_eq!(p.z[0], 0.0);
            assert_eq!(*p.z.last().unwrap(), 0.0);
            assert!(p.z.iter().all(|&z| (0.0..=1.2).contains(&z)));
        }
    }

    #[test]
    fn rwa_variants() {
        let t = GatePreset::Hadamard.target();
        let chrw = synthesize(&t, 10.0 * PI, 1.0, 4000).unwrap();
        let rwa = synthesize_protocol(ProtocolKind::Rwa, &t, 10.0 * PI, 1.0, 4000).unwrap();
        let bs = synthesize_protocol(ProtocolKind::RwaBs, &t, 10.0 * PI, 1.0, 4000).unwrap();
        rwa.check_invariants().unwrap();
        for i in 0..rwa.len() {
            assert!((rwa.omega0[i] - 2.0 * chrw.omega_eff[i]).abs() < 1e-15);
            assert!((rwa.omega_q[i] - 1.0 - chrw.delta_eff[i]).abs() < 1e-15);
            assert_eq!(rwa.omega1[i], 0.0);
            let shift = bs.omega0[i].powi(2) / 4.0;
            assert!((bs.omega_q[i] - rwa.omega_q[i] + shift).abs() < 1e-15);
        }
    }

    #[test]
    fn rotating_models_recover_design() {
        let t = GatePreset::Not.target();
        for kind in [ProtocolKind::Rwa, ProtocolKind::RwaBs] {
            let p = synthesize_protocol(kind, &t, 20.0 * PI, 1.0, 4000).unwrap();
            let m = p.model();
            for i in (0..p.len()).step_by(97) {
                let e = m.effective(p.times[i]);
                let sz = 0.5 * e.detuning + if kind == ProtocolKind::RwaBs { e.bs_shift } else { 0.0 };
                assert!((sz - 0.5 * p.delta_eff[i]).abs() < 1e-14);
                assert!((e.amplitude - p.omega_eff[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interpolation_hits_samples_and_midpoints() {
        let p = synthesize(&GatePreset::Hadamard.target(), 5.0 * PI, 1.0, 2000).unwrap();
        let i = 700;
        let s = p.snapshot_at(p.times[i]);
        assert_eq!(s.qubit_frequency, p.omega_q[i]);
        let mid = 0.5 * (p.times[i] + p.times[i + 1]);
        let m = p.snapshot_at(mid);
        assert!((m.tones[0].amplitude - 0.5 * (p.omega0[i] + p.omega0[i + 1])).abs() < 1e-15);
        let end = p.snapshot_at(p.duration + 1.0);
        assert_eq!(end.qubit_frequency, *p.omega_q.last().unwrap());
    }
}
