// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Ultrafast nonadiabatic geometric gates driven beyond the rotating-wave
//! approximation.
//!
//! The crate synthesizes drive waveforms for a strongly driven two-level
//! system using a Bessel-renormalized ("counter-rotating hybridized rotating
//! wave", CHRW) effective model, and compares it with the usual RWA and
//! Bloch–Siegert-corrected RWA (RWA-BS) baselines by exact lab-frame
//! simulation.
//!
//! Module map:
//! - [`numerics`]: Bessel functions, adaptive Runge–Kutta propagation,
//!   root finding and quadrature.
//! - [`hamiltonians`]: lab-frame and effective Hamiltonians, frame
//!   generators.
//! - [`pulse_synthesis`]: invariant-based inverse engineering of gate
//!   programs.
//! - [`gatesim`]: propagators, gate fidelities, gate-time scans, two-qubit
//!   and three-level extensions.
//! - [`noise`]: systematic and stochastic control imperfections.
//! - [`open_system`]: Lindblad evolution and input-state-averaged fidelity.
//! - [`fluxonium`]: circuit Hamiltonian of a fluxonium qubit.
//!
//! Units: unless stated otherwise, frequencies are in units of the drive
//! frequency `omega` and times in units of `1/omega`. Two-level matrices use
//! the basis ordering `(|e>, |g>)` with `sigma_z = diag(1, -1)`.

pub mod error;
pub mod fluxonium;
pub mod gatesim;
pub mod hamiltonians;
pub mod noise;
pub mod numerics;
pub mod open_system;
pub mod pulse_synthesis;

pub use error::{Error, Result};
pub use numerics::linalg::CMatrix;
