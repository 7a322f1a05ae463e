// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario execution and the built-in reproduction presets.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use chrw_core::fluxonium::{drive_matrix_elements, spectrum};
use chrw_core::gatesim::{
    constant_drive_average_infidelity, final_gate_fidelity, fidelity_trace, population_traces, shortest_gate_time,
    three_level_infidelity, two_qubit_gate_at, uniform_times, ConstantDrive, LeakageSystem, ScanConfig,
};
use chrw_core::hamiltonians::ProtocolKind;
use chrw_core::noise::{robustness_sweep, NoiseKind, NoiseSpec, NoiseTarget, SweepSettings, SWEEP_GATE_K};
use chrw_core::open_system::{decoherence_sweep, PhysicalUnits, FULL_GRID};
use chrw_core::pulse_synthesis::{solve_lambda, synthesize_protocol, GatePreset, PulseProgram};

use crate::config::{ExperimentConfig, Scenario, UnitMode};
use crate::csv::{write_csv, Cell, Metadata, Table};
use crate::error::CliError;

/// Reference gate times (units of π/ω) of each protocol for the
/// decoherence comparison, ordered as [`ProtocolKind::ALL`].
pub const HADAMARD_GATE_TIMES: [u32; 3] = [6, 10, 27];
pub const CNOT_GATE_TIMES: [u32; 3] = [5, 8, 25];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub full_grid: bool,
}

/// Built-in configuration of a reproduction scenario.
pub fn reproduction_config(scenario: Scenario) -> Result<ExperimentConfig, CliError> {
    let mut c = ExperimentConfig::new(scenario);
    match scenario {
        Scenario::Fig1 => {
            c.drive.omega0 = vec![0.1];
            c.drive.delta = 0.1;
            c.drive.duration = 200.0;
            c.drive.points = 2000;
        }
        Scenario::Fig2 => {
            c.drive.omega0 = (1..=10).map(|i| 0.05 * f64::from(i)).collect();
            c.drive.delta = 0.1;
            c.drive.points = 4000;
        }
        Scenario::Fig3 => {
            c.gate = Some(GatePreset::Hadamard);
            c.t = vec![6.0];
        }
        Scenario::Fig4 | Scenario::Table2 => {
            c.t = (1..=60).map(f64::from).collect();
        }
        Scenario::Fig5 => {
            c.gate = Some(GatePreset::Hadamard);
            c.t = vec![f64::from(SWEEP_GATE_K)];
            c.noise.targets = vec![NoiseTarget::Omega0, NoiseTarget::Detuning];
            c.noise.rates = (0..=20).map(|i| -0.05 + 0.005 * f64::from(i)).collect();
            c.seed = 20_260_101;
        }
        Scenario::Fig6 => {
            c.units = UnitMode::Physical;
            c.decoherence.gamma_hz = vec![0.0, 5e3, 10e3, 25e3, 50e3, 100e3];
        }
        Scenario::Fig7 => {
            c.protocols = vec![ProtocolKind::Chrw];
            c.leakage.gaps = (1..=20).map(f64::from).collect();
        }
        Scenario::Table1 => {}
        other => return Err(CliError::Output(format!("'{other}' is not a reproduction scenario"))),
    }
    Ok(c)
}

fn require_gate(cfg: &ExperimentConfig) -> Result<GatePreset, CliError> {
    cfg.gate.ok_or_else(|| CliError::Config { line: 0, message: format!("scenario '{}' needs a gate", cfg.scenario) })
}

fn integer_k(t: f64) -> Result<u32, CliError> {
    if t >= 1.0 && (t - t.round()).abs() < 1e-9 {
        Ok(t.round() as u32)
    } else {
        Err(CliError::Output(format!("gate time {t} π/ω is not a positive integer multiple of π/ω")))
    }
}

struct Writer<'a> {
    dir: &'a Path,
    meta: Metadata,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, table: &Table, extra: &[(&str, String)]) -> Result<(), CliError> {
        let mut meta = self.meta.clone();
        for (k, v) in extra {
            meta = meta.with(k, v);
        }
        let path = self.dir.join(name);
        write_csv(&path, table, &meta)?;
        log::debug!("wrote {} rows to {}", table.rows.len(), path.display());
        self.written.push(path);
        Ok(())
    }
}

/// Runs `cfg`, writing its artifacts into `out_dir`, and returns their paths.
pub fn run_scenario(cfg: &ExperimentConfig, out_dir: &Path, opts: RunOptions) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)?;
    let text = cfg.to_text();
    let meta = Metadata::for_run(&text, cfg.seed).with("scenario", cfg.scenario).with("units", cfg.units);
    let mut w = Writer { dir: out_dir, meta, written: Vec::new() };
    log::info!("running scenario {} into {}", cfg.scenario, out_dir.display());
    match cfg.scenario {
        Scenario::Synthesize | Scenario::Fig3 => synthesize(cfg, &mut w)?,
        Scenario::Simulate => simulate(cfg, &mut w)?,
        Scenario::Sweep => sweep(cfg, require_gate(cfg)?, &mut w)?,
        Scenario::Fig4 => {
            for preset in GatePreset::ALL {
                sweep(cfg, preset, &mut w)?;
            }
        }
        Scenario::Noise => noise(cfg, require_gate(cfg)?, cfg.noise.kind, &cfg.noise.rates, &mut w)?,
        Scenario::Fig5 => {
            let gate = require_gate(cfg)?;
            noise(cfg, gate, NoiseKind::Systematic, &cfg.noise.rates, &mut w)?;
            let eps: Vec<f64> = (0..=5).map(|i| 0.01 * f64::from(i)).collect();
            noise(cfg, gate, NoiseKind::Stochastic, &eps, &mut w)?;
        }
        Scenario::Lindblad => {
            let gate = require_gate(cfg)?;
            let ks = broadcast_times(cfg)?;
            lindblad(cfg, gate, &ks, opts, &mut w)?;
        }
        Scenario::Fig6 => {
            lindblad(cfg, GatePreset::Hadamard, &HADAMARD_GATE_TIMES, opts, &mut w)?;
            lindblad(cfg, GatePreset::CnotLike, &CNOT_GATE_TIMES, opts, &mut w)?;
        }
        Scenario::Leakage => {
            let gate = require_gate(cfg)?;
            let ks = cfg.t.iter().map(|&t| integer_k(t)).collect::<Result<Vec<_>, _>>()?;
            leakage(cfg, &[(gate, ks)], &mut w)?;
        }
        Scenario::Fig7 => {
            let jobs = [(GatePreset::Not, vec![5]), (GatePreset::Hadamard, vec![6]), (GatePreset::PhasePi, vec![6])];
            leakage(cfg, &jobs, &mut w)?;
        }
        Scenario::Fluxonium => fluxonium(cfg, &mut w)?,
        Scenario::Fig1 => fig1(cfg, &mut w)?,
        Scenario::Fig2 => fig2(cfg, &mut w)?,
        Scenario::Table1 => table1(&mut w)?,
        Scenario::Table2 => table2(cfg, &mut w)?,
    }
    Ok(w.written)
}

fn broadcast_times(cfg: &ExperimentConfig) -> Result<Vec<u32>, CliError> {
    let ks = cfg.t.iter().map(|&t| integer_k(t)).collect::<Result<Vec<_>, _>>()?;
    match ks.len() {
        1 => Ok(vec![ks[0]; cfg.protocols.len()]),
        n if n == cfg.protocols.len() => Ok(ks),
        n => Err(CliError::Output(format!("{n} gate times given for {} protocols", cfg.protocols.len()))),
    }
}

fn program(kind: ProtocolKind, gate: GatePreset, k: u32, samples: usize) -> Result<PulseProgram, CliError> {
    let target = gate.target().resolved()?;
    Ok(synthesize_protocol(kind, &target, f64::from(k) * PI, 1.0, samples)?)
}

fn synthesize(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let gate = require_gate(cfg)?;
    for &kind in &cfg.protocols {
        for &t in &cfg.t {
            let k = integer_k(t)?;
            let p = program(kind, gate, k, cfg.samples)?;
            let mut table = Table::new(&["t", "Omega0", "Omega1", "phi0", "phi1", "omega_q", "Z", "Delta_eff", "Omega_eff"]);
            for i in 0..p.len() {
                table.push(
                    [p.times[i], p.omega0[i], p.omega1[i], p.phi0[i], p.phi1[i], p.omega_q[i], p.z[i], p.delta_eff[i], p.omega_eff[i]]
                        .into_iter()
                        .map(Cell::from)
                        .collect(),
                );
            }
            let extra = [
                ("gate", gate.to_string()),
                ("protocol", kind.to_string()),
                ("T_over_pi", k.to_string()),
                ("units_convention", "omega = 1; times in 1/omega; frequencies in omega".to_string()),
            ];
            w.csv(&format!("program_{gate}_{kind}_T{k}.csv"), &table, &extra)?;
        }
    }
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let gate = require_gate(cfg)?;
    let mut table = Table::new(&["protocol", "T_over_pi", "t", "Fbar"]);
    let mut extra = vec![("gate", gate.to_string())];
    for &kind in &cfg.protocols {
        for &t in &cfg.t {
            let k = integer_k(t)?;
            let p = program(kind, gate, k, cfg.samples)?;
            let times = uniform_times(p.duration, cfg.trace_points);
            let trace = if gate.is_two_qubit() { two_qubit_gate_at(&p, &times)? } else { fidelity_trace(&p.model(), &p, &times)? };
            for (t, f) in trace.times.iter().zip(&trace.fbar) {
                table.push(vec![kind.to_string().into(), k.into(), (*t).into(), (*f).into()]);
            }
            extra.push(("favg", format!("{kind} T{k} {:.11e}", trace.favg)));
        }
    }
    let extra: Vec<(&str, String)> = extra.into_iter().collect();
    w.csv(&format!("simulate_{gate}.csv"), &table, &extra)
}

fn sweep(cfg: &ExperimentConfig, gate: GatePreset, w: &mut Writer<'_>) -> Result<(), CliError> {
    let ks = cfg.t.iter().map(|&t| integer_k(t)).collect::<Result<Vec<_>, _>>()?;
    let target = gate.target().resolved()?;
    let jobs: Vec<(ProtocolKind, u32)> = cfg.protocols.iter().flat_map(|&p| ks.iter().map(move |&k| (p, k))).collect();
    let fids = jobs
        .par_iter()
        .map(|&(kind, k)| final_gate_fidelity(kind, gate, &target, k, cfg.samples))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["protocol", "k", "fidelity", "infidelity"]);
    for (&(kind, k), &f) in jobs.iter().zip(&fids) {
        table.push(vec![kind.to_string().into(), k.into(), f.into(), (1.0 - f).into()]);
    }
    w.csv(&format!("sweep_{gate}.csv"), &table, &[("gate", gate.to_string()), ("floor", format!("{:?}", cfg.floor))])
}

fn noise(cfg: &ExperimentConfig, gate: GatePreset, kind: NoiseKind, rates: &[f64], w: &mut Writer<'_>) -> Result<(), CliError> {
    let k = match cfg.t.first() {
        Some(&t) => integer_k(t)?,
        None => SWEEP_GATE_K,
    };
    let settings = SweepSettings { k, samples: cfg.samples, trials: cfg.noise.trials };
    let template = NoiseSpec { kind, targets: cfg.noise.targets.clone(), delta: 0.0, segments: cfg.noise.segments, seed: cfg.seed };
    let mut table = Table::new(&["protocol", "rate", "mean_infidelity", "std_infidelity", "trials"]);
    for &proto in &cfg.protocols {
        for pt in robustness_sweep(gate, proto, &template, rates, &settings)? {
            table.push(vec![proto.to_string().into(), pt.rate.into(), pt.mean_infidelity.into(), pt.std_infidelity.into(), pt.trials.into()]);
        }
    }
    let targets: Vec<&str> = cfg.noise.targets.iter().map(|t| t.name()).collect();
    let extra = [
        ("gate", gate.to_string()),
        ("noise_kind", kind.to_string()),
        ("targets", targets.join(" ")),
        ("segments", cfg.noise.segments.to_string()),
        ("T_over_pi", k.to_string()),
    ];
    w.csv(&format!("noise_{gate}_{kind}.csv"), &table, &extra)
}

fn lindblad(cfg: &ExperimentConfig, gate: GatePreset, ks: &[u32], opts: RunOptions, w: &mut Writer<'_>) -> Result<(), CliError> {
    let protocols: Vec<ProtocolKind> = if cfg.scenario == Scenario::Fig6 { ProtocolKind::ALL.to_vec() } else { cfg.protocols.clone() };
    let entries: Vec<(ProtocolKind, u32)> = protocols.into_iter().zip(ks.iter().copied()).collect();
    let units = PhysicalUnits { drive_hz: cfg.decoherence.drive_hz };
    let grid = if opts.full_grid { FULL_GRID } else { cfg.decoherence.grid };
    let rows = decoherence_sweep(gate, &entries, &cfg.decoherence.gamma_hz, &units, grid)?;
    let mut table = Table::new(&["gamma_over_2pi_Hz", "protocol", "k", "mean_infidelity", "n_states"]);
    for r in rows {
        table.push(vec![r.gamma_over_2pi_hz.into(), r.protocol.to_string().into(), r.k.into(), r.mean_infidelity.into(), r.n_states.into()]);
    }
    let extra = [("gate", gate.to_string()), ("drive_hz", format!("{:?}", units.drive_hz)), ("rates", "gamma = gamma_phi".to_string())];
    w.csv(&format!("lindblad_{gate}.csv"), &table, &extra)
}

fn leakage(cfg: &ExperimentConfig, jobs: &[(GatePreset, Vec<u32>)], w: &mut Writer<'_>) -> Result<(), CliError> {
    let mut table = Table::new(&["gate", "protocol", "k", "gap", "omega2", "infidelity"]);
    for (gate, ks) in jobs {
        for &kind in &cfg.protocols {
            for &k in ks {
                let p = program(kind, *gate, k, cfg.samples)?;
                let rows = cfg
                    .leakage
                    .gaps
                    .par_iter()
                    .map(|&gap| {
                        let leak = LeakageSystem::above(&p, gap, cfg.leakage.coupling);
                        three_level_infidelity(&p, &leak).map(|inf| (gap, leak.omega2, inf))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                for (gap, w2, inf) in rows {
                    table.push(vec![gate.to_string().into(), kind.to_string().into(), k.into(), gap.into(), w2.into(), inf.into()]);
                }
            }
        }
    }
    w.csv("leakage.csv", &table, &[("coupling_ratio", format!("{:?}", cfg.leakage.coupling))])
}

#[derive(Serialize)]
struct FluxoniumReport {
    version: &'static str,
    config_sha256: String,
    e_c_ghz: f64,
    e_l_ghz: f64,
    e_j_ghz: f64,
    phi_ext: f64,
    n_basis: usize,
    omega01_ghz: f64,
    omega12_ghz: f64,
    anharmonicity_ghz: f64,
    convergence: f64,
    flux_matrix_elements: [[f64; 3]; 3],
}

fn fluxonium(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let p = cfg.fluxonium;
    let s = spectrum(&p)?;
    let m = drive_matrix_elements(&p)?;
    let mut table = Table::new(&[
        "E_C", "E_L", "E_J", "phi_ext", "n_basis", "omega01", "omega12", "anharmonicity", "convergence", "phi01", "phi12", "phi02",
    ]);
    table.push(vec![
        p.e_c.into(), p.e_l.into(), p.e_j.into(), p.phi_ext.into(), p.n_basis.into(), s.omega01.into(), s.omega12.into(),
        s.anharmonicity.into(), s.convergence.into(), m[0][1].into(), m[1][2].into(), m[0][2].into(),
    ]);
    w.csv("fluxonium.csv", &table, &[("energy_units", "GHz (E/h); transitions are omega/2pi".to_string())])?;
    let report = FluxoniumReport {
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: w.meta.get("config_sha256").unwrap_or_default().to_string(),
        e_c_ghz: p.e_c,
        e_l_ghz: p.e_l,
        e_j_ghz: p.e_j,
        phi_ext: p.phi_ext,
        n_basis: p.n_basis,
        omega01_ghz: s.omega01,
        omega12_ghz: s.omega12,
        anharmonicity_ghz: s.anharmonicity,
        convergence: s.convergence,
        flux_matrix_elements: m,
    };
    let path = w.dir.join("fluxonium.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    w.written.push(path);
    Ok(())
}

fn fig1(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let omega0 = cfg.drive.omega0.first().copied().unwrap_or(0.1);
    let times = uniform_times(cfg.drive.duration, cfg.drive.points);
    let mut table = Table::new(&["protocol", "t", "P_g_exact", "P_g_effective"]);
    for &kind in &cfg.protocols {
        let drive = ConstantDrive::new(kind, omega0, cfg.drive.delta, 1.0, 0.0)?;
        let (exact, eff) = population_traces(&drive, &times)?;
        for i in 0..times.len() {
            table.push(vec![kind.to_string().into(), times[i].into(), exact[i].into(), eff[i].into()]);
        }
    }
    w.csv("fig1_populations.csv", &table, &[("Omega0", format!("{omega0:?}")), ("Delta", format!("{:?}", cfg.drive.delta))])
}

fn fig2(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let jobs: Vec<(f64, ProtocolKind)> = cfg.drive.omega0.iter().flat_map(|&a| cfg.protocols.iter().map(move |&p| (a, p))).collect();
    let vals = jobs
        .par_iter()
        .map(|&(a, kind)| constant_drive_average_infidelity(kind, a, cfg.drive.delta, 1.0, 100.0 / a, cfg.drive.points))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["Omega0", "protocol", "avg_infidelity"]);
    for (&(a, kind), v) in jobs.iter().zip(vals) {
        table.push(vec![a.into(), kind.to_string().into(), v.into()]);
    }
    w.csv("fig2_average_infidelity.csv", &table, &[("duration", "100/Omega0".to_string())])
}

fn table1(w: &mut Writer<'_>) -> Result<(), CliError> {
    let mut table = Table::new(&["gate", "alpha0", "beta0", "theta_target", "Lambda"]);
    for gate in [GatePreset::Not, GatePreset::Hadamard, GatePreset::PhasePi] {
        let t = gate.target();
        let lambda = solve_lambda(t.alpha0, t.beta0, t.theta_target)?;
        table.push(vec![gate.to_string().into(), t.alpha0.into(), t.beta0.into(), t.theta_target.into(), lambda.into()]);
    }
    w.csv("table1.csv", &table, &[])
}

fn table2(cfg: &ExperimentConfig, w: &mut Writer<'_>) -> Result<(), CliError> {
    let k_max = cfg.t.iter().copied().fold(0.0, f64::max).round().max(1.0) as u32;
    let scan = ScanConfig { k_max, confirm: cfg.confirm, samples: cfg.samples };
    let mut table = Table::new(&["gate", "protocol", "k_shortest", "fidelity"]);
    for gate in GatePreset::ALL {
        for &kind in &cfg.protocols {
            let s = shortest_gate_time(kind, gate, cfg.floor, &scan)?;
            let (k, f) = match s.shortest {
                Some(k) => (Cell::from(k), Cell::from(s.fidelities[(k - 1) as usize].1)),
                None => (Cell::from("none"), Cell::from(f64::NAN)),
            };
            table.push(vec![gate.to_string().into(), kind.to_string().into(), k, f]);
        }
    }
    w.csv("table2.csv", &table, &[("floor", format!("{:?}", cfg.floor)), ("confirm", cfg.confirm.to_string())])
}
