// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) integration of matrix-valued ODEs.
//!
//! The integrator never steps across a requested stop time, so callers can
//! pass the breakpoints of piecewise-defined generators (sampled pulse grids)
//! and get exact landings there.

use super::linalg::{identity, polar_project, unitarity_defect, CMatrix, I};
use crate::error::{Error, Result};

/// Step-size control knobs. Times are in units of `1/ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_step: 2.0 * std::f64::consts::PI / 50.0,
        }
    }
}

impl ToleranceConfig {
    /// Rejects non-positive entries and steps too coarse for ~10ω content.
    pub fn validate(&self) -> Result<()> {
        let limit = 2.0 * std::f64::consts::PI / 50.0;
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must be positive: {self:?}"
            )));
        }
        if self.max_step > limit * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "max_step {} exceeds 2π/50",
                self.max_step
            )));
        }
        Ok(())
    }
}

const MIN_STEP: f64 = 1e-13;
const MAX_REJECTS: usize = 10_000_000;

// Dormand–Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lincomb(y: &CMatrix, h: f64, terms: &[(f64, &CMatrix)]) -> CMatrix {
    let mut out = y.clone();
    for (coef, k) in terms {
        if *coef != 0.0 {
            out.zip_apply(*k, |a, b| *a += b * (h * coef));
        }
    }
    out
}

/// Integrates `dy/dt = rhs(t, y)` from `t0`, returning the state at each
/// entry of `stops` (sorted, all `>= t0`).
pub fn integrate<F>(rhs: F, y0: &CMatrix, t0: f64, stops: &[f64], tol: &ToleranceConfig) -> Result<Vec<CMatrix>>
where
    F: Fn(f64, &CMatrix) -> CMatrix,
{
    tol.validate()?;
    if stops.windows(2).any(|w| w[1] < w[0]) || stops.first().is_some_and(|&s| s < t0) {
        return Err(Error::Domain("stop times must be sorted and >= t0".into()));
    }
    let mut out = Vec::with_capacity(stops.len());
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = rhs(t, &y);
    let mut h = tol.max_step.min(0.01);
    let mut rejects = 0usize;

    for &stop in stops {
        while stop - t > 1e-14 * stop.abs().max(1.0) {
            let remaining = stop - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let k2 = rhs(t + C2 * step, &lincomb(&y, step, &[(A21, &k1)]));
            let k3 = rhs(t + C3 * step, &lincomb(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                t + C4 * step,
                &lincomb(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                t + C5 * step,
                &lincomb(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + step,
                &lincomb(
                    &y,
                    step,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = lincomb(
                &y,
                step,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let t_new = if last { stop } else { t + step };
            let k7 = rhs(t_new, &y_new);

            let mut err = 0.0f64;
            for idx in 0..y.len() {
                let e = (k1[idx] * E1
                    + k3[idx] * E3
                    + k4[idx] * E4
                    + k5[idx] * E5
                    + k6[idx] * E6
                    + k7[idx] * E7)
                    * step;
                let scale = tol.abs_tol + tol.rel_tol * y[idx].norm().max(y_new[idx].norm());
                let ratio = e.norm() / scale;
                if ratio.is_nan() {
                    err = f64::NAN;
                    break;
                }
                err = err.max(ratio);
            }
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                if !last {
                    h = (step * factor).min(tol.max_step);
                }
                // After a clipped landing keep the previously proposed size.
                h = h.min(tol.max_step);
            } else {
                h = step * factor.min(1.0);
                rejects += 1;
                if h < MIN_STEP || rejects > MAX_REJECTS {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size underflow (h = {h:e}, error ratio {err:e})"),
                    });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn merged_stops(t0: f64, targets: &[f64], breakpoints: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let t_end = targets.iter().copied().fold(t0, f64::max);
    let mut all: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > t0 && b < t_end)
        .chain(targets.iter().copied())
        .collect();
    all.sort_by(|a, b| a.total_cmp(b));
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    let index = targets
        .iter()
        .map(|&t| {
            let tol = 1e-14 * t.abs().max(1.0);
            let i = all.partition_point(|&s| s < t - tol);
            debug_assert!((all[i] - t).abs() <= tol);
            i
        })
        .collect();
    (all, index)
}

fn finish_unitary(u: CMatrix) -> CMatrix {
    let defect = unitarity_defect(&u);
    if defect > 1e-10 {
        log::debug!("polar projection applied to propagator (defect {defect:e})");
        polar_project(&u)
    } else {
        u
    }
}

/// Propagator `U(t1, t0)` solving `i dU/dt = H(t) U`.
///
/// `breakpoints` are times where `H` has kinks; the integrator lands on them.
pub fn propagate_unitary<H>(
    hamiltonian: H,
    t0: f64,
    t1: f64,
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<CMatrix>
where
    H: Fn(f64) -> CMatrix,
{
    let mut all = propagate_unitary_at(hamiltonian, t0, &[t1], breakpoints, tol)?;
    Ok(all.pop().expect("one output per target"))
}

/// Propagators `U(t_k, t0)` for each sorted `t_k` in `times`.
pub fn propagate_unitary_at<H>(
    hamiltonian: H,
    t0: f64,
    times: &[f64],
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<CMatrix>>
where
    H: Fn(f64) -> CMatrix,
{
    if times.iter().any(|&t| t < t0) {
        return Err(Error::Domain("propagation target precedes t0".into()));
    }
    let first = hamiltonian(t0);
    let dim = first.nrows();
    let (stops, index) = merged_stops(t0, times, breakpoints);
    let states = integrate(
        |t, u| -(hamiltonian(t) * u) * I,
        &identity(dim),
        t0,
        &stops,
        tol,
    )?;
    Ok(index.into_iter().map(|i| finish_unitary(states[i].clone())).collect())
}

/// Integrates a general matrix ODE through `breakpoints`, returning the state
/// at each of `times`.
pub fn evolve_at<F>(
    rhs: F,
    y0: &CMatrix,
    t0: f64,
    times: &[f64],
    breakpoints: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<CMatrix>>
where
    F: Fn(f64, &CMatrix) -> CMatrix,
{
    if times.iter().any(|&t| t < t0) {
        return Err(Error::Domain("evolution target precedes t0".into()));
    }
    let (stops, index) = merged_stops(t0, times, breakpoints);
    let states = integrate(rhs, y0, t0, &stops, tol)?;
    Ok(index.into_iter().map(|i| states[i].clone()).collect())
}
