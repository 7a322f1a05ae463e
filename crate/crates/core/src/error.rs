// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the numerical kernels and gate builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the supported domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator could not advance.
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// A root-finding bracket does not contain a sign change.
    #[error("no sign change in bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// A requested control cannot be realized within the model's validity range.
    #[error("validity error: {0}")]
    Validity(String),

    /// An iterative procedure did not converge.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },

    /// A density matrix lost positivity beyond tolerance.
    #[error("density matrix lost positivity: minimum eigenvalue {0:e}")]
    Positivity(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
