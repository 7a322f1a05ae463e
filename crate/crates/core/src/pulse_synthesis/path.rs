// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonians::Z_VALIDITY_MAX;
use crate::numerics::{bessel_j, find_root, integrate_adaptive};

/// Path parameters of a geometric gate.
///
/// `theta_target` is an absolute geometric phase, not reduced mod 2π; the
/// branch matters when solving for `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTarget {
    pub alpha0: f64,
    pub beta0: f64,
    pub theta_target: f64,
    pub lambda: Option<f64>,
}

impl GateTarget {
    pub fn new(alpha0: f64, beta0: f64, theta_target: f64, lambda: Option<f64>) -> Result<Self> {
        let t = Self { alpha0, beta0, theta_target, lambda };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_target.abs() < 2.0 * PI) {
            return Err(Error::Domain(format!(
                "theta_target {} outside (-2π, 2π)",
                self.theta_target
            )));
        }
        if let Some(l) = self.lambda {
            if !(0.0..=2.0).contains(&l) {
                return Err(Error::Domain(format!("lambda {l} outside [0, 2]")));
            }
        }
        Ok(())
    }

    /// Returns a copy with `lambda` filled in by [`solve_lambda`] if absent.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        match self.lambda {
            Some(_) => Ok(*self),
            None => Ok(Self {
                lambda: Some(solve_lambda(self.alpha0, self.beta0, self.theta_target)?),
                ..*self
            }),
        }
    }

    fn lambda_or_err(&self) -> Result<f64> {
        self.lambda
            .ok_or_else(|| Error::Domain("gate target has no lambda; call resolved() first".into()))
    }
}

/// Named gates with their path parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GatePreset {
    Not,
    Hadamard,
    PhasePi,
    /// Controlled version of the NOT path; the single-qubit block is [`GatePreset::Not`].
    CnotLike,
}

impl GatePreset {
    pub const ALL: [GatePreset; 4] = [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi, GatePreset::CnotLike];

    /// Unresolved target (no `lambda`). The NOT path sits on the 3π/2 branch
    /// because Θ₊ ≥ π whenever β₀ = π/2.
    pub fn target(self) -> GateTarget {
        let (alpha0, beta0, theta_target) = match self {
            GatePreset::Not | GatePreset::CnotLike => (FRAC_PI_2, FRAC_PI_2, 1.5 * PI),
            GatePreset::Hadamard => (FRAC_PI_2, FRAC_PI_4, FRAC_PI_2),
            GatePreset::PhasePi => (0.0, 0.0, FRAC_PI_2),
        };
        GateTarget { alpha0, beta0, theta_target, lambda: None }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GatePreset::CnotLike)
    }
}

impl fmt::Display for GatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GatePreset::Not => "NOT",
            GatePreset::Hadamard => "Hadamard",
            GatePreset::PhasePi => "PhasePi",
            GatePreset::CnotLike => "CNOTlike",
        })
    }
}

impl FromStr for GatePreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "not" | "x" => Ok(GatePreset::Not),
            "hadamard" | "h" => Ok(GatePreset::Hadamard),
            "phasepi" | "phase" | "z" => Ok(GatePreset::PhasePi),
            "cnotlike" | "cnot" => Ok(GatePreset::CnotLike),
            "" => Err(Error::Domain("empty gate name".into())),
            _ => Err(Error::Domain(format!("unknown gate '{s}'"))),
        }
    }
}

/// Path angles and their rates at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSample {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

/// `α = α₀ + π[1 − cos(πt/T)]`, `β = β₀ + Λ sin²(πt/T)`.
pub fn schedule(target: &GateTarget, duration: f64, t: f64) -> Result<ScheduleSample> {
    let lambda = target.lambda_or_err()?;
    if !(duration > 0.0) {
        return Err(Error::Domain(format!("gate duration {duration} must be positive")));
    }
    let slack = 1e-12 * duration;
    if t < -slack || t > duration + slack {
        return Err(Error::Domain(format!("t = {t} outside [0, {duration}]")));
    }
    let u = PI * t / duration;
    Ok(ScheduleSample {
        t,
        alpha: target.alpha0 + PI * (1.0 - u.cos()),
        beta: target.beta0 + lambda * u.sin().powi(2),
        alpha_dot: PI * PI / duration * u.sin(),
        beta_dot: lambda * PI / duration * (2.0 * u).sin(),
    })
}

/// Effective controls that keep the invariant's eigenstates free of
/// dynamical phase. `phase` is `None` where the coupling vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub detuning: f64,
    pub amplitude: f64,
    pub phase: Option<f64>,
    /// `Ω̃₀ cos φ₀`
    pub in_phase: f64,
    /// `Ω̃₀ sin φ₀`
    pub quadrature: f64,
}

pub fn required_controls(s: &ScheduleSample) -> Controls {
    let (sa, ca) = s.alpha.sin_cos();
    let s2b = (2.0 * s.beta).sin();
    let in_phase = 0.25 * (s.alpha_dot * s2b * sa - 2.0 * s.beta_dot * ca);
    let quadrature = 0.25 * (s.alpha_dot * s2b * ca + 2.0 * s.beta_dot * sa);
    let amplitude = in_phase.hypot(quadrature);
    Controls {
        detuning: -s.alpha_dot * s.beta.sin().powi(2),
        amplitude,
        phase: (amplitude > 0.0).then(|| quadrature.atan2(in_phase)),
        in_phase,
        quadrature,
    }
}

fn theta_integrand(beta0: f64, lambda: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| u.sin() * (0.5 * (beta0 + lambda * u.sin().powi(2))).sin().powi(2)
}

/// Θ₊(T) after the substitution `u = πt/T`; independent of `T`.
pub fn geometric_phase(target: &GateTarget) -> Result<f64> {
    let lambda = target.lambda_or_err()?;
    Ok(PI * integrate_adaptive(theta_integrand(target.beta0, lambda), 0.0, PI, 1e-13)?)
}

/// Θ₊(T) = ∫₀ᵀ α̇ sin²(β/2) dt evaluated directly in the time domain.
pub fn geometric_phase_time_domain(target: &GateTarget, duration: f64) -> Result<f64> {
    target.lambda_or_err()?;
    let f = |t: f64| {
        let s = schedule(target, duration, t.clamp(0.0, duration)).expect("validated schedule");
        s.alpha_dot * (0.5 * s.beta).sin().powi(2)
    };
    integrate_adaptive(f, 0.0, duration, 1e-12)
}

/// Λ ∈ [0, 2] realizing the absolute geometric phase `theta`.
///
/// Scans a coarse grid for the first sign change, then refines by Brent.
pub fn solve_lambda(alpha0: f64, beta0: f64, theta: f64) -> Result<f64> {
    let phase = |lambda: f64| -> Result<f64> {
        geometric_phase(&GateTarget { alpha0, beta0, theta_target: theta, lambda: Some(lambda) })
    };
    const STEPS: usize = 200;
    let mut lo = 0.0;
    let mut f_lo = phase(lo)? - theta;
    if f_lo == 0.0 {
        return Ok(0.0);
    }
    for i in 1..=STEPS {
        let hi = 2.0 * i as f64 / STEPS as f64;
        let f_hi = phase(hi)? - theta;
        if f_lo * f_hi <= 0.0 {
            let g = |l: f64| phase(l).map(|v| v - theta).unwrap_or(f64::NAN);
            return find_root(g, lo, hi, 1e-14);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Bracket {
        lo: 0.0,
        hi: 2.0,
        f_lo: phase(0.0)?,
        f_hi: phase(2.0)?,
    })
}

/// Frame parameter `Z` and qubit frequency `ω_q` realizing the effective
/// amplitude `Ω̃₀ = ω_q J₁(Z)` and detuning `Δ̃ = ω_q J₀(Z) − ω`.
pub fn solve_z_wq(omega_tilde: f64, delta_tilde: f64, omega: f64) -> Result<(f64, f64)> {
    let base = omega + delta_tilde;
    if !(base > 0.0) {
        return Err(Error::Validity(format!(
            "ω + Δ̃ = {base} must be positive"
        )));
    }
    if omega_tilde < 0.0 || !omega_tilde.is_finite() {
        return Err(Error::Domain(format!("effective amplitude {omega_tilde} must be non-negative")));
    }
    if omega_tilde == 0.0 {
        return Ok((0.0, base));
    }
    let ratio = omega_tilde / base;
    let max_ratio = bessel_j(1, Z_VALIDITY_MAX)? / bessel_j(0, Z_VALIDITY_MAX)?;
    if ratio > max_ratio {
        return Err(Error::Validity(format!(
            "required J₁/J₀ ratio {ratio:.6} exceeds {max_ratio:.6} (Z would exceed {Z_VALIDITY_MAX})"
        )));
    }
    let f = |z: f64| bessel_j(1, z).unwrap_or(f64::NAN) / bessel_j(0, z).unwrap_or(f64::NAN) - ratio;
    let z = find_root(f, 0.0, Z_VALIDITY_MAX, 1e-15)?;
    Ok((z, base / bessel_j(0, z)?))
}
