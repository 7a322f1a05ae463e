// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Shared numerical kernels.
//!
//! Everything here is a pure function of its inputs and can be called from
//! parallel sweep drivers without coordination.

pub mod bessel;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;

pub use bessel::{bessel_j, bessel_j_seq};
pub use ode::{evolve_at, propagate_unitary, propagate_unitary_at, ToleranceConfig};
pub use quad::integrate_adaptive;
pub use roots::find_root;
