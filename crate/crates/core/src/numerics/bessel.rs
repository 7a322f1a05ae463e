// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Bessel functions of the first kind, `J_m(x)` for integer order.
//!
//! Small arguments use the ascending power series directly. Larger arguments
//! use Miller's downward recurrence started well above both the order and the
//! argument, normalized with `J_0 + 2 Σ_k J_{2k} = 1`.

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: u32 = 64;
/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 50.0;

const SERIES_LIMIT: f64 = 4.0;
const RESCALE_THRESHOLD: f64 = 1e250;

fn check_domain(m: u32, x: f64) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {m} exceeds maximum {MAX_ORDER}"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// `J_m(x)` with absolute error below `1e-12` for `m <= 64`, `|x| <= 50`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check_domain(m, x)?;
    let value = if x.abs() <= SERIES_LIMIT {
        series(m, x.abs())
    } else {
        miller(m, x.abs())[m as usize]
    };
    Ok(if x < 0.0 && m % 2 == 1 { -value } else { value })
}

/// `[J_0(x), J_1(x), ..., J_{m_max}(x)]` in one pass.
pub fn bessel_j_seq(m_max: u32, x: f64) -> Result<Vec<f64>> {
    check_domain(m_max, x)?;
    let ax = x.abs();
    let mut values: Vec<f64> = if ax <= SERIES_LIMIT {
        (0..=m_max).map(|m| series(m, ax)).collect()
    } else {
        let mut all = miller(m_max, ax);
        all.truncate(m_max as usize + 1);
        all
    };
    if x < 0.0 {
        for (m, v) in values.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(values)
}

fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^m / m!, built incrementally so large m underflows gracefully.
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / f64::from(j);
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + f64::from(m)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
    }
    sum
}

/// Returns `J_0..=J_start` for `x > 0`, where only the first `m + 1` entries
/// are guaranteed accurate.
fn miller(m: u32, x: f64) -> Vec<f64> {
    let top = f64::from(m).max(x.ceil());
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * (k as f64) / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > RESCALE_THRESHOLD {
            for v in vals[k - 1..].iter_mut() {
                *v /= RESCALE_THRESHOLD;
            }
        }
    }
    let norm = vals[0]
        + 2.0
            * vals
                .iter()
                .skip(2)
                .step_by(2)
                .take(start / 2)
                .sum::<f64>();
    vals.truncate(start + 1);
    for v in vals.iter_mut() {
        *v /= norm;
    }
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Straight 30-term ascending series with factorials from `f64` gamma-free
    /// products, kept separate from the production path.
    fn oracle(m: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..30u32 {
            let mut denom = 1.0;
            for j in 1..=k {
                denom *= f64::from(j);
            }
            for j in 1..=(k + m) {
                denom *= f64::from(j);
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (x / 2.0).powi((2 * k + m) as i32) / denom;
        }
        sum
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j1_of_one_matches_series_oracle() {
        let expected = oracle(1, 1.0);
        assert!((expected - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(1, 1.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_oracle_over_moderate_range() {
        for m in 0..=12 {
            for i in 0..=60 {
                let x = 0.1 * f64::from(i);
                let got = bessel_j(m, x).unwrap();
                let want = oracle(m, x);
                assert!((got - want).abs() < 1e-12, "J_{m}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_switch_point() {
        for m in 0..=20 {
            let a = series(m, SERIES_LIMIT);
            let b = miller(m, SERIES_LIMIT)[m as usize];
            assert!((a - b).abs() < 1e-14, "order {m}: {a} vs {b}");
        }
    }

    #[test]
    fn large_argument_values() {
        // Reference values from standard tables.
        let cases = [
            (0, 10.0, -0.245_935_764_451_348_3),
            (1, 10.0, 0.043_472_746_168_861_6),
            (5, 20.0, 0.151_169_767_982_394_93),
            (0, 50.0, 0.055_812_327_669_251_86),
            (30, 25.0, 0.011_809_026_124_268_96),
        ];
        for (m, x, want) in cases {
            let got = bessel_j(m, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{m}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn odd_orders_are_odd() {
        for m in 0..6 {
            let a = bessel_j(m, 7.3).unwrap();
            let b = bessel_j(m, -7.3).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * b).abs() < 1e-15);
        }
    }

    #[test]
    fn sequence_matches_pointwise() {
        for &x in &[0.3, 3.9, 4.1, 12.0, -8.5] {
            let seq = bessel_j_seq(25, x).unwrap();
            for (m, v) in seq.iter().enumerate() {
                assert!((v - bessel_j(m as u32, x).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j(65, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, 50.5), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn jacobi_anger_expansion() {
        const M: i32 = 20;
        for iz in 0..=12 {
            let z = 0.1 * f64::from(iz);
            let seq = bessel_j_seq(M as u32, z).unwrap();
            let j = |m: i32| {
                let v = seq[m.unsigned_abs() as usize];
                if m < 0 && m % 2 != 0 {
                    -v
                } else {
                    v
                }
            };
            for it in 0..37 {
                let tau = 0.17 * f64::from(it) - 3.0;
                let exact = Complex64::new(0.0, z * tau.sin()).exp();
                let sum: Complex64 = (-M..=M)
                    .map(|m| Complex64::from_polar(j(m), f64::from(m) * tau))
                    .sum();
                assert!((exact - sum).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn speed_limit_constant() {
        let ratio = 4.0 * bessel_j(1, 1.0).unwrap() / bessel_j(2, 1.0).unwrap();
        let want = 4.0 * oracle(1, 1.0) / oracle(2, 1.0);
        assert!((ratio - want).abs() < 1e-12);
        assert!((ratio - 15.318_963_946_332_42).abs() < 1e-10, "{ratio}");
        assert_eq!(ratio.round(), 15.0);
    }
}
