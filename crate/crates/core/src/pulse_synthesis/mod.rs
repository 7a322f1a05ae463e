// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Inverse engineering of geometric gates from a Lewis–Riesenfeld invariant.
//!
//! A gate is specified by the invariant's path `(α(t), β(t))` and the
//! geometric phase accumulated along it. The schedule fixes the effective
//! controls that cancel the dynamical phase; the CHRW frame relations then
//! map them back to lab waveforms.

mod invariant;
mod path;
mod program;

pub use invariant::{
    dynamical_phase_residual, eigenvectors, invariant_matrix, invariant_residual,
    lewis_riesenfeld_phase, program_geometric_phase, target_unitary,
};
pub use path::{
    geometric_phase, geometric_phase_time_domain, required_controls, schedule, solve_lambda,
    solve_z_wq, Controls, GatePreset, GateTarget, ScheduleSample,
};
pub use program::{synthesize, synthesize_protocol, ProgramModel, PulseProgram, DEFAULT_SAMPLES, MIN_SAMPLES};
