// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use chrw_cli::{parse_config, parse_config_with, reproduction_config, CliError, ExperimentConfig, Scenario};
use chrw_core::pulse_synthesis::GatePreset;

fn line_of(e: CliError) -> usize {
    match e {
        CliError::Config { line, .. } => line,
        other => panic!("expected a config error, got {other}"),
    }
}

fn chrw(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chrw"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn unknown_key_reports_its_line() {
    let text = "scenario = sweep\ngate = NOT\n\nT = 1..5\nbogus = 3\n";
    assert_eq!(line_of(parse_config(text).unwrap_err()), 5);
}

#[test]
fn type_mismatch_reports_its_line() {
    let text = "scenario = sweep\ngate = NOT\nT = 4\nsamples = many\n";
    let e = parse_config(text).unwrap_err();
    assert!(e.to_string().contains("samples"));
    assert_eq!(line_of(e), 4);
}

#[test]
fn missing_and_empty_gate_are_errors() {
    let missing = parse_config("scenario = synthesize\nT = 6\n").unwrap_err();
    assert!(missing.to_string().contains("gate"));
    assert_eq!(line_of(missing), 3);
    let empty = parse_config("scenario = synthesize\ngate =\nT = 6\n").unwrap_err();
    assert_eq!(line_of(empty), 2);
    assert!(parse_config("scenario = synthesize\ngate = Toffoli\nT = 6\n").is_err());
}

#[test]
fn unknown_section_and_repeated_key_are_errors() {
    assert_eq!(line_of(parse_config("scenario = fluxonium\n[optics]\n").unwrap_err()), 2);
    assert_eq!(line_of(parse_config("scenario = fluxonium\nseed = 1\nseed = 2\n").unwrap_err()), 3);
}

#[test]
fn scenario_must_match_subcommand() {
    assert!(parse_config_with("scenario = fluxonium\n", Some(Scenario::Table1)).is_err());
    let cfg = parse_config_with("", Some(Scenario::Fluxonium)).unwrap();
    assert_eq!(cfg.scenario, Scenario::Fluxonium);
}

#[test]
fn range_grammar_expands_inclusively() {
    let cfg = parse_config("scenario = sweep\ngate = H\nT = 1..40 step 1\n").unwrap();
    assert_eq!(cfg.t.len(), 40);
    assert_eq!(cfg.t[0], 1.0);
    assert_eq!(cfg.t[39], 40.0);
}

#[test]
fn canonical_text_round_trips() {
    let text = "scenario = noise\ngate = Hadamard\nT = 16\nseed = 7\n\n[noise]\nkind = stochastic\ntargets = Omega0, Delta\nrates = 0..0.05 step 0.01\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    for s in Scenario::REPRODUCTIONS {
        let cfg: ExperimentConfig = reproduction_config(s).unwrap();
        assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg, "scenario {s}");
    }
    assert_eq!(cfg.gate, Some(GatePreset::Hadamard));
}

#[test]
fn table1_is_reproducible_byte_for_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(chrw(&["reproduce", "table1"], a.path()).status.success());
    assert!(chrw(&["reproduce", "table1"], b.path()).status.success());
    let ta = std::fs::read(a.path().join("table1.csv")).unwrap();
    let tb = std::fs::read(b.path().join("table1.csv")).unwrap();
    assert_eq!(ta, tb);

    let rows = data_rows(&a.path().join("table1.csv"));
    assert_eq!(rows[0], "gate,alpha0,beta0,theta_target,Lambda");
    let want = [0.8089, 0.3867, 1.4669];
    for (row, w) in rows[1..].iter().zip(want) {
        let lambda: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((lambda - w).abs() <= 2e-3, "{row}");
    }
}

#[test]
fn table2_lists_twelve_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = chrw(&["reproduce", "table2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("table2.csv"));
    assert_eq!(rows.len(), 13);
    assert!(rows[1..].iter().all(|r| !r.split(',').nth(2).unwrap().is_empty()));
}

#[test]
fn invalid_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "gate = NOT\nT = 5\nwavelength = 3\n").unwrap();
    let out = chrw(&["synthesize", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn synthesize_writes_metadata_headed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("h.cfg");
    std::fs::write(&cfg, "gate = H\nT = 6\nprotocols = CHRW\nsamples = 2000\n").unwrap();
    let out = chrw(&["synthesize", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("program_Hadamard_CHRW_T6.csv")).unwrap();
    assert!(text.lines().take_while(|l| l.starts_with('#')).any(|l| l.starts_with("# config_sha256 = ")));
    // Header plus samples + 1 grid points.
    assert_eq!(data_rows(&dir.path().join("program_Hadamard_CHRW_T6.csv")).len(), 2002);
}

#[test]
fn fluxonium_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = chrw(&["fluxonium"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fluxonium.json")).unwrap()).unwrap();
    let w12 = json["omega12_ghz"].as_f64().unwrap();
    assert!(w12 > 3.0 && w12 < 4.0);
    assert!(json["convergence"].as_f64().unwrap() < 1e-6);
}

#[test]
fn documented_noise_example_parses() {
    let text = "scenario = noise          # optional when it matches the subcommand
gate = Hadamard           # NOT, Hadamard, PhasePi, CNOTlike
protocols = CHRW, RWA-BS, RWA
T = 16                    # gate time in units of pi/omega
samples = 4000
seed = 7

[noise]
kind = stochastic         # or systematic
targets = Omega0, Delta   # Omega0, Omega1, Delta, phi0, phi1, T
rates = 0..0.05 step 0.01
segments = 100
trials = 200
";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.protocols.len(), 3);
    assert_eq!(cfg.noise.rates.len(), 6);
    assert_eq!(cfg.noise.targets.len(), 2);
}
