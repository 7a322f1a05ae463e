// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use chrw_core::hamiltonians::ProtocolKind;
use chrw_core::noise::{robustness_sweep, NoiseSpec, NoiseTarget, SweepSettings};
use chrw_core::pulse_synthesis::GatePreset;

#[test]
fn systematic_five_percent_orders_protocols() {
    let spec = NoiseSpec::systematic(&[NoiseTarget::Omega0, NoiseTarget::Detuning], 0.0);
    let settings = SweepSettings::default();
    let inf: Vec<f64> = ProtocolKind::ALL
        .into_iter()
        .map(|k| robustness_sweep(GatePreset::Hadamard, k, &spec, &[0.05], &settings).unwrap()[0].mean_infidelity)
        .collect();
    let (chrw, bs, rwa) = (inf[0], inf[1], inf[2]);
    assert!(chrw < bs && bs < rwa, "CHRW {chrw:e}, RWA-BS {bs:e}, RWA {rwa:e}");
}
