// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Multiplicative control imperfections and robustness sweeps.
//!
//! A noisy control is `X' = X (1 + δX)`. Systematic noise uses one constant
//! `δX`; stochastic noise draws `δX` uniformly from `[−ε, ε]` on each of
//! `segments` equal time bins, independently for every targeted control.
//! Detuning noise scales `ω_q − ω` rather than `ω_q`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gatesim::{effective_lab_propagator, exact_lab_propagator, gate_fidelity};
use crate::hamiltonians::ProtocolKind;
use crate::numerics::linalg::CMatrix;
use crate::pulse_synthesis::{synthesize_protocol, GatePreset, PulseProgram, DEFAULT_SAMPLES};

/// Largest admissible `|δ|` or `ε`.
pub const MAX_RATE: f64 = 0.5;
pub const DEFAULT_SEGMENTS: usize = 100;
pub const DEFAULT_TRIALS: usize = 200;
/// Gate time of the robustness sweeps in units of `π/ω`.
pub const SWEEP_GATE_K: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Systematic,
    Stochastic,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Systematic => "systematic",
            Self::Stochastic => "stochastic",
        })
    }
}

impl FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "systematic" => Ok(Self::Systematic),
            "stochastic" => Ok(Self::Stochastic),
            other => Err(Error::Domain(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// A control that noise can act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseTarget {
    Omega0,
    Omega1,
    /// The detuning `ω_q − ω`.
    Detuning,
    Phi0,
    Phi1,
    Duration,
}

impl NoiseTarget {
    pub const ALL: [Self; 6] = [Self::Omega0, Self::Omega1, Self::Detuning, Self::Phi0, Self::Phi1, Self::Duration];

    pub fn name(self) -> &'static str {
        match self {
            Self::Omega0 => "Omega0",
            Self::Omega1 => "Omega1",
            Self::Detuning => "Delta",
            Self::Phi0 => "phi0",
            Self::Phi1 => "phi1",
            Self::Duration => "T",
        }
    }
}

impl fmt::Display for NoiseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(key))
            .or(match key.to_ascii_lowercase().as_str() {
                "detuning" | "delta_q" => Some(Self::Detuning),
                "duration" => Some(Self::Duration),
                _ => None,
            })
            .ok_or_else(|| Error::Domain(format!("unknown noise target '{key}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub targets: Vec<NoiseTarget>,
    /// `δ` for systematic noise, peak rate `ε` for stochastic noise.
    pub delta: f64,
    pub segments: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn systematic(targets: &[NoiseTarget], delta: f64) -> Self {
        Self { kind: NoiseKind::Systematic, targets: targets.to_vec(), delta, segments: 1, seed: 0 }
    }

    pub fn stochastic(targets: &[NoiseTarget], epsilon: f64, segments: usize, seed: u64) -> Self {
        Self { kind: NoiseKind::Stochastic, targets: targets.to_vec(), delta: epsilon, segments, seed }
    }

    pub fn with_rate(&self, delta: f64) -> Self {
        Self { delta, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.abs() <= MAX_RATE) {
            return Err(Error::Domain(format!("noise rate {} outside [−{MAX_RATE}, {MAX_RATE}]", self.delta)));
        }
        if self.segments == 0 {
            return Err(Error::Domain("noise needs at least one segment".into()));
        }
        if self.kind == NoiseKind::Stochastic && self.delta < 0.0 {
            return Err(Error::Domain("peak stochastic rate must be non-negative".into()));
        }
        Ok(())
    }

    fn targets_sorted(&self) -> Vec<NoiseTarget> {
        let mut t = self.targets.clone();
        t.sort();
        t.dedup();
        t
    }
}

fn scale_by(values: &mut [f64], factor: impl Fn(usize) -> f64) {
    for (i, v) in values.iter_mut().enumerate() {
        // x + xδ rather than x(1 + δ) keeps δ = 0 bit-exact.
        *v += *v * factor(i);
    }
}

/// Scales `target` of `program` sample-wise by `1 + rate(i)`.
fn apply_target(program: &mut PulseProgram, target: NoiseTarget, rate: impl Fn(usize) -> f64) {
    match target {
        NoiseTarget::Omega0 => scale_by(&mut program.omega0, rate),
        NoiseTarget::Omega1 => scale_by(&mut program.omega1, rate),
        NoiseTarget::Phi0 => scale_by(&mut program.phi0, rate),
        NoiseTarget::Phi1 => scale_by(&mut program.phi1, rate),
        NoiseTarget::Detuning => {
            let w = program.omega;
            for (i, wq) in program.omega_q.iter_mut().enumerate() {
                *wq += (*wq - w) * rate(i);
            }
        }
        NoiseTarget::Duration => {
            // Stretching the clock: the waveform is played at a different rate.
            scale_by(&mut program.times, &rate);
            let n = program.times.len();
            program.duration += program.duration * rate(n - 1);
            program.times[n - 1] = program.duration;
        }
    }
}

/// Constant multiplicative error `δ` on every targeted control.
pub fn apply_systematic(program: &PulseProgram, spec: &NoiseSpec) -> PulseProgram {
    let mut out = program.clone();
    for target in spec.targets_sorted() {
        apply_target(&mut out, target, |_| spec.delta);
    }
    out
}

/// Segment index of every sample of `program` for `segments` equal bins.
fn segment_of(program: &PulseProgram, segments: usize) -> Vec<usize> {
    program
        .times
        .iter()
        .map(|&t| (((t / program.duration) * segments as f64) as usize).min(segments - 1))
        .collect()
}

/// Per-target segment values `δX` of a stochastic spec, in sorted target
/// order.
///
/// Draws are taken target by target from a ChaCha8 stream seeded with
/// `spec.seed`, `segments` values each.
pub fn stochastic_draws(spec: &NoiseSpec) -> Vec<(NoiseTarget, Vec<f64>)> {
    let segments = spec.segments.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let eps = spec.delta.abs();
    spec.targets_sorted()
        .into_iter()
        .map(|target| {
            let draws = (0..segments).map(|_| if eps > 0.0 { rng.random_range(-eps..=eps) } else { 0.0 }).collect();
            (target, draws)
        })
        .collect()
}

/// Applies one piecewise-constant `δX(t)` per target.
///
/// A duration target uses the last segment's value since the gate time is a
/// single number.
pub fn apply_stochastic(program: &PulseProgram, spec: &NoiseSpec) -> PulseProgram {
    let mut out = program.clone();
    let bins = segment_of(program, spec.segments.max(1));
    for (target, draws) in stochastic_draws(spec) {
        if target == NoiseTarget::Duration {
            // A non-uniform stretch could reorder the samples.
            let last = draws[draws.len() - 1];
            apply_target(&mut out, target, |_| last);
            continue;
        }
        apply_target(&mut out, target, |i| draws[bins[i]]);
    }
    out
}

/// Applies `spec` according to its kind.
pub fn apply_noise(program: &PulseProgram, spec: &NoiseSpec) -> Result<PulseProgram> {
    spec.validate()?;
    Ok(match spec.kind {
        NoiseKind::Systematic => apply_systematic(program, spec),
        NoiseKind::Stochastic => apply_stochastic(program, spec),
    })
}

/// Ideal gate of a noiseless program: its effective model mapped to the lab.
pub fn reference_gate(program: &PulseProgram) -> Result<CMatrix> {
    effective_lab_propagator(&program.model(), program.duration)
}

/// `1 − F̄` between a reference gate and the exact lab evolution of `noisy`
/// up to its own final time.
pub fn noisy_infidelity(reference: &CMatrix, noisy: &PulseProgram) -> Result<f64> {
    let act = exact_lab_propagator(noisy, noisy.duration)?;
    Ok(1.0 - gate_fidelity(reference, &act, None, 2)?)
}

/// Settings of [`robustness_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub k: u32,
    pub samples: usize,
    /// Realizations per stochastic grid point; ignored for systematic noise.
    pub trials: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { k: SWEEP_GATE_K, samples: DEFAULT_SAMPLES, trials: DEFAULT_TRIALS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisePoint {
    pub protocol: ProtocolKind,
    pub rate: f64,
    pub mean_infidelity: f64,
    /// Sample standard deviation over trials (zero for a single run).
    pub std_infidelity: f64,
    pub trials: usize,
}

/// Final-time infidelity of `preset` under `template` noise at each rate of
/// `grid`.
///
/// Trial `j` of a stochastic point uses seed `template.seed ^ j`.
pub fn robustness_sweep(
    preset: GatePreset,
    kind: ProtocolKind,
    template: &NoiseSpec,
    grid: &[f64],
    settings: &SweepSettings,
) -> Result<Vec<NoisePoint>> {
    let target = preset.target().resolved()?;
    let duration = f64::from(settings.k) * std::f64::consts::PI;
    let clean = synthesize_protocol(kind, &target, duration, 1.0, settings.samples)?;
    let reference = reference_gate(&clean)?;
    let trials = match template.kind {
        NoiseKind::Systematic => 1,
        NoiseKind::Stochastic => settings.trials.max(1),
    };
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..trials).map(move |j| (g, j))).collect();
    let values = jobs
        .par_iter()
        .map(|&(g, j)| {
            let spec = NoiseSpec { delta: grid[g], seed: template.seed ^ j as u64, ..template.clone() };
            noisy_infidelity(&reference, &apply_noise(&clean, &spec)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(grid
        .iter()
        .zip(values.chunks(trials))
        .map(|(&rate, v)| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = if v.len() > 1 {
                v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
            } else {
                0.0
            };
            NoisePoint { protocol: kind, rate, mean_infidelity: mean, std_infidelity: var.sqrt(), trials }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatesim::program_gate_fidelity;
    use crate::pulse_synthesis::synthesize;
    use std::collections::hash_map::DefaultHasher;
    use std::f64::consts::PI;
    use std::hash::{Hash, Hasher};

    fn digest(p: &PulseProgram) -> u64 {
        let mut h = DefaultHasher::new();
        for arr in [&p.times, &p.omega0, &p.omega1, &p.phi0, &p.phi1, &p.omega_q, &p.z, &p.delta_eff, &p.omega_eff] {
            for v in arr.iter() {
                v.to_bits().hash(&mut h);
            }
        }
        p.duration.to_bits().hash(&mut h);
        h.finish()
    }

    fn program() -> PulseProgram {
        synthesize(&GatePreset::Hadamard.target(), 6.0 * PI, 1.0, 2000).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let p = program();
        let all = NoiseTarget::ALL;
        assert_eq!(apply_systematic(&p, &NoiseSpec::systematic(&all, 0.0)), p);
        assert_eq!(apply_stochastic(&p, &NoiseSpec::stochastic(&all, 0.0, 100, 9)), p);
    }

    #[test]
    fn inputs_are_never_mutated() {
        let p = program();
        let before = digest(&p);
        let _ = apply_systematic(&p, &NoiseSpec::systematic(&NoiseTarget::ALL, 0.03));
        let _ = apply_stochastic(&p, &NoiseSpec::stochastic(&NoiseTarget::ALL, 0.05, 10, 1));
        assert_eq!(digest(&p), before);
    }

    #[test]
    fn systematic_scales_peak_amplitude() {
        let p = program();
        let q = apply_systematic(&p, &NoiseSpec::systematic(&[NoiseTarget::Omega0], 0.01));
        assert!((q.peak_omega0() / p.peak_omega0() - 1.01).abs() < 1e-14);
        assert_eq!(q.omega_q, p.omega_q);
    }

    #[test]
    fn detuning_noise_scales_offset_from_carrier() {
        let p = program();
        let q = apply_systematic(&p, &NoiseSpec::systematic(&[NoiseTarget::Detuning], 0.2));
        for (a, b) in p.omega_q.iter().zip(&q.omega_q) {
            assert!(((b - 1.0) - 1.2 * (a - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn duration_noise_stretches_clock() {
        let p = program();
        let q = apply_systematic(&p, &NoiseSpec::systematic(&[NoiseTarget::Duration], 0.1));
        assert!((q.duration - 1.1 * p.duration).abs() < 1e-12);
        assert_eq!(q.times.last().copied(), Some(q.duration));
        assert_eq!(q.omega0, p.omega0);
    }

    #[test]
    fn systematic_composition_is_multiplicative() {
        let p = program();
        let (d1, d2) = (0.03, -0.07);
        let targets = [NoiseTarget::Omega0, NoiseTarget::Phi1, NoiseTarget::Detuning];
        let twice = apply_systematic(&apply_systematic(&p, &NoiseSpec::systematic(&targets, d1)), &NoiseSpec::systematic(&targets, d2));
        let once = apply_systematic(&p, &NoiseSpec::systematic(&targets, (1.0 + d1) * (1.0 + d2) - 1.0));
        for (a, b) in [(&twice.omega0, &once.omega0), (&twice.phi1, &once.phi1), (&twice.omega_q, &once.omega_q)] {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn stochastic_is_deterministic_and_bounded() {
        let p = program();
        let spec = NoiseSpec::stochastic(&[NoiseTarget::Omega0, NoiseTarget::Phi0], 0.05, 100, 42);
        let a = apply_stochastic(&p, &spec);
        assert_eq!(a, apply_stochastic(&p, &spec));
        assert_ne!(a, apply_stochastic(&p, &NoiseSpec { seed: 43, ..spec.clone() }));
        for (x, y) in p.omega0.iter().zip(&a.omega0) {
            assert!((y - x).abs() <= 0.05 * x.abs() + 1e-15);
        }
    }

    #[test]
    fn stochastic_is_piecewise_constant() {
        let p = program();
        let q = apply_stochastic(&p, &NoiseSpec::stochastic(&[NoiseTarget::Omega0], 0.05, 10, 3));
        let bins = segment_of(&p, 10);
        let mut factor = vec![None; 10];
        for i in 0..p.len() {
            if p.omega0[i].abs() < 1e-6 {
                continue;
            }
            let r = q.omega0[i] / p.omega0[i];
            match factor[bins[i]] {
                None => factor[bins[i]] = Some(r),
                Some(f) => assert!((f - r).abs() < 1e-12),
            }
        }
        assert!(factor.iter().flatten().count() >= 8);
    }

    #[test]
    fn stochastic_draws_have_zero_mean() {
        // 10⁴ draws of U[−ε, ε]: the mean has standard deviation ε/√(3·10⁴).
        let eps = 0.05;
        let n = 10_000;
        let draws = stochastic_draws(&NoiseSpec::stochastic(&[NoiseTarget::Omega0], eps, n, 2024));
        let values = &draws[0].1;
        assert_eq!(values.len(), n);
        assert!(values.iter().all(|d| d.abs() <= eps));
        let sum: f64 = values.iter().sum();
        let mean = sum / n as f64;
        assert!(mean.abs() <= 3.0 * eps / (3.0 * n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn spec_validation() {
        assert!(NoiseSpec::systematic(&[NoiseTarget::Omega0], 0.6).validate().is_err());
        assert!(NoiseSpec::stochastic(&[NoiseTarget::Omega0], 0.1, 0, 1).validate().is_err());
        assert!(NoiseSpec::stochastic(&[NoiseTarget::Omega0], -0.1, 5, 1).validate().is_err());
        assert!(NoiseSpec::systematic(&[NoiseTarget::Omega0], -0.5).validate().is_ok());
        assert_eq!("delta".parse::<NoiseTarget>().unwrap(), NoiseTarget::Detuning);
        assert_eq!("omega1".parse::<NoiseTarget>().unwrap(), NoiseTarget::Omega1);
        assert!("foo".parse::<NoiseTarget>().is_err());
        assert_eq!("Stochastic".parse::<NoiseKind>().unwrap(), NoiseKind::Stochastic);
    }

    #[test]
    fn zero_rate_sweep_matches_noiseless_fidelity_exactly() {
        let settings = SweepSettings { k: 6, samples: 2000, trials: 1 };
        let spec = NoiseSpec::systematic(&[NoiseTarget::Omega0, NoiseTarget::Detuning], 0.0);
        let pts = robustness_sweep(GatePreset::Hadamard, ProtocolKind::Chrw, &spec, &[0.0], &settings).unwrap();
        let clean = synthesize(&GatePreset::Hadamard.target().resolved().unwrap(), 6.0 * PI, 1.0, 2000).unwrap();
        let f = program_gate_fidelity(&clean).unwrap();
        assert_eq!(pts[0].mean_infidelity.to_bits(), (1.0 - f).to_bits());
    }

    #[test]
    fn stochastic_sweep_is_reproducible() {
        let settings = SweepSettings { k: 6, samples: 2000, trials: 3 };
        let spec = NoiseSpec::stochastic(&[NoiseTarget::Omega0], 0.05, 20, 11);
        let a = robustness_sweep(GatePreset::Not, ProtocolKind::Chrw, &spec, &[0.05], &settings).unwrap();
        let b = robustness_sweep(GatePreset::Not, ProtocolKind::Chrw, &spec, &[0.05], &settings).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].trials, 3);
    }
}
