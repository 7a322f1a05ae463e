// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Invariant operator, its eigenstates and the resulting gate.
//!
//! The eigenvectors below are written in the `(|e⟩, |g⟩)` storage order:
//! `|φ₊⟩ = (cos(β/2), i e^{−iα} sin(β/2))` and
//! `|φ₋⟩ = (i e^{iα} sin(β/2), cos(β/2))`.
//! With the coupling `Ω̃₀(e^{iφ₀}σ₋ + h.c.)` and the controls of
//! [`required_controls`](super::required_controls) these are the states that
//! satisfy the invariant equation and carry no dynamical phase.

use super::path::{geometric_phase, schedule, GateTarget, ScheduleSample};
use super::program::PulseProgram;
use crate::error::{Error, Result};
use crate::hamiltonians::{effective_hamiltonian, ProtocolKind};
use crate::numerics::linalg::{c, commutator, max_abs, outer, CMatrix, CVector, I};

/// Eigenvectors `(|φ₊⟩, |φ₋⟩)` of the invariant for path angles `(α, β)`.
pub fn eigenvectors(alpha: f64, beta: f64) -> (CVector, CVector) {
    let (s, co) = (0.5 * beta).sin_cos();
    let plus = CVector::from_vec(vec![c(co, 0.0), I * c(0.0, -alpha).exp() * s]);
    let minus = CVector::from_vec(vec![I * c(0.0, alpha).exp() * s, c(co, 0.0)]);
    (plus, minus)
}

/// `I(t) = Ξ₀ (|φ₊⟩⟨φ₊| − |φ₋⟩⟨φ₋|)`.
pub fn invariant_matrix(s: &ScheduleSample, xi0: f64) -> CMatrix {
    let (cb, sb) = (s.beta.cos(), s.beta.sin());
    let e = c(0.0, s.alpha).exp();
    CMatrix::from_row_slice(
        2,
        2,
        &[c(cb, 0.0), -I * sb * e, I * sb * e.conj(), c(-cb, 0.0)],
    ) * c(xi0, 0.0)
}

/// Ideal gate `e^{iΘ}|φ₊(0)⟩⟨φ₊(0)| + e^{−iΘ}|φ₋(0)⟩⟨φ₋(0)|`.
pub fn target_unitary(target: &GateTarget) -> CMatrix {
    let (plus, minus) = eigenvectors(target.alpha0, target.beta0);
    let th = target.theta_target;
    outer(&plus, &plus) * c(0.0, th).exp() + outer(&minus, &minus) * c(0.0, -th).exp()
}

fn chrw_at(program: &PulseProgram, t: f64) -> CMatrix {
    effective_hamiltonian(&program.model_as(ProtocolKind::Chrw), t)
}

fn clamped_schedule(program: &PulseProgram, t: f64) -> Result<ScheduleSample> {
    schedule(&program.target, program.duration, t.clamp(0.0, program.duration))
}

/// `‖i ∂I/∂t − [H_CHRW, I]‖∞` with the time derivative by central difference.
pub fn invariant_residual(program: &PulseProgram, t: f64) -> Result<f64> {
    let h = 1e-6 * program.duration.max(1.0);
    let (lo, hi) = ((t - h).max(0.0), (t + h).min(program.duration));
    let di = (invariant_matrix(&clamped_schedule(program, hi)?, 1.0)
        - invariant_matrix(&clamped_schedule(program, lo)?, 1.0))
        / c(hi - lo, 0.0);
    let inv = invariant_matrix(&clamped_schedule(program, t)?, 1.0);
    Ok(max_abs(&(di * I - commutator(&chrw_at(program, t), &inv))))
}

/// `|⟨φ₊(t)|H_CHRW(t)|φ₊(t)⟩|`.
pub fn dynamical_phase_residual(program: &PulseProgram, t: f64) -> Result<f64> {
    let s = clamped_schedule(program, t)?;
    let (plus, _) = eigenvectors(s.alpha, s.beta);
    Ok((plus.adjoint() * chrw_at(program, t) * &plus)[(0, 0)].norm())
}

/// Lewis–Riesenfeld phase of `|φ₊⟩`, `∫₀ᵀ ⟨φ₊|i∂_t − H_CHRW|φ₊⟩ dt`, by
/// composite Simpson on the program grid.
///
/// Returns `(total, geometric_part)`; the difference is the dynamical phase.
pub fn lewis_riesenfeld_phase(program: &PulseProgram) -> Result<(f64, f64)> {
    let n = program.times.len();
    if n < 3 {
        return Err(Error::Domain("program too short for phase integration".into()));
    }
    let h = 1e-6 * program.duration.max(1.0);
    let mut geo = Vec::with_capacity(n);
    let mut dyn_ = Vec::with_capacity(n);
    for &t in &program.times {
        let s = clamped_schedule(program, t)?;
        let (plus, _) = eigenvectors(s.alpha, s.beta);
        let lo = clamped_schedule(program, t - h)?;
        let hi = clamped_schedule(program, t + h)?;
        let (vp, _) = eigenvectors(hi.alpha, hi.beta);
        let (vm, _) = eigenvectors(lo.alpha, lo.beta);
        let dv = (vp - vm) / c(hi.t - lo.t, 0.0);
        geo.push((plus.adjoint() * dv)[(0, 0)] * I);
        dyn_.push((plus.adjoint() * chrw_at(program, t) * &plus)[(0, 0)]);
    }
    let integrate = |f: &[num_complex::Complex64]| -> f64 {
        let dt = program.duration / (n - 1) as f64;
        let segs = n - 1;
        let even = segs - segs % 2;
        let mut acc = 0.0;
        for k in (0..even).step_by(2) {
            acc += dt / 3.0 * (f[k].re + 4.0 * f[k + 1].re + f[k + 2].re);
        }
        if even < segs {
            acc += 0.5 * dt * (f[segs - 1].re + f[segs].re);
        }
        acc
    };
    let g = integrate(&geo);
    let d = integrate(&dyn_);
    Ok((g - d, g))
}

/// Convenience: Θ₊ for a program's (resolved) target.
pub fn program_geometric_phase(program: &PulseProgram) -> Result<f64> {
    geometric_phase(&program.target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatesim::effective_frame_propagator;
    use crate::numerics::linalg::{identity, phase_aligned_distance, sigma_x, sigma_z};
    use crate::pulse_synthesis::{synthesize, GatePreset};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn sample(alpha: f64, beta: f64) -> ScheduleSample {
        ScheduleSample { t: 0.0, alpha, beta, alpha_dot: 0.0, beta_dot: 0.0 }
    }

    #[test]
    fn invariant_examples() {
        let i0 = invariant_matrix(&sample(0.7, 0.0), 2.0);
        assert!(max_abs(&(i0 - sigma_z() * c(2.0, 0.0))) < 1e-15);
        let iy = invariant_matrix(&sample(0.0, FRAC_PI_2), 1.0);
        // −i e^{i0} in the upper-right corner: σ_y.
        assert!(max_abs(&(iy - crate::numerics::linalg::sigma_y())) < 1e-15);
    }

    #[test]
    fn invariant_is_traceless_with_unit_spectrum() {
        for k in 0..50 {
            let s = sample(0.3 * f64::from(k), 0.11 * f64::from(k));
            let m = invariant_matrix(&s, 1.7);
            assert!(m.trace().norm() < 1e-14);
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            assert!((det + c(1.7 * 1.7, 0.0)).norm() < 1e-13);
            let (p, q) = eigenvectors(s.alpha, s.beta);
            assert!((&m * &p - &p * c(1.7, 0.0)).norm() < 1e-14);
            assert!((&m * &q + &q * c(1.7, 0.0)).norm() < 1e-14);
            assert!((p.adjoint() * &q)[(0, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn target_matrices() {
        let not = target_unitary(&GatePreset::Not.target());
        assert!(max_abs(&(not - sigma_x() * c(0.0, -1.0))) < 1e-15);
        let phase = target_unitary(&GatePreset::PhasePi.target());
        assert!(max_abs(&(phase - sigma_z() * c(0.0, 1.0))) < 1e-15);
        let had = target_unitary(&GatePreset::Hadamard.target());
        let want = (sigma_x() + sigma_z()) * c(0.0, FRAC_1_SQRT_2);
        assert!(max_abs(&(had.clone() - want)) < 1e-15);
        assert!(max_abs(&(&had * &had + identity(2))) < 1e-14);
    }

    #[test]
    fn synthesized_programs_satisfy_invariant_equation() {
        for preset in [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi] {
            let p = synthesize(&preset.target(), 6.0 * PI, 1.0, 4000).unwrap();
            for i in (0..p.len()).step_by(40) {
                let t = p.times[i];
                assert!(invariant_residual(&p, t).unwrap() <= 1e-6, "{preset} t={t}");
                assert!(dynamical_phase_residual(&p, t).unwrap() <= 1e-8, "{preset} t={t}");
            }
        }
    }

    #[test]
    fn perturbed_detuning_breaks_invariant() {
        let mut p = synthesize(&GatePreset::Hadamard.target(), 6.0 * PI, 1.0, 4000).unwrap();
        for d in p.delta_eff.iter_mut() {
            *d += 0.1;
        }
        let t = p.times[1234];
        assert!(invariant_residual(&p, t).unwrap() > 1e-3);
        assert!(dynamical_phase_residual(&p, t).unwrap() > 1e-6);
    }

    #[test]
    fn lr_phase_equals_geometric_phase() {
        for preset in [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi] {
            let p = synthesize(&preset.target(), 8.0 * PI, 1.0, 4000).unwrap();
            let (total, geo) = lewis_riesenfeld_phase(&p).unwrap();
            let theta = program_geometric_phase(&p).unwrap();
            assert!((total - theta).abs() < 1e-6, "{preset}: {total} vs {theta}");
            assert!((geo - theta).abs() < 1e-6);
        }
    }

    #[test]
    fn effective_propagation_reaches_target() {
        for preset in [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi] {
            let p = synthesize(&preset.target(), 6.0 * PI, 1.0, 4000).unwrap();
            let u = effective_frame_propagator(&p.model(), p.duration).unwrap();
            let want = target_unitary(&p.target);
            assert!(phase_aligned_distance(&u, &want) <= 1e-4, "{preset}");
        }
    }
}
