// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Line-oriented experiment configuration.
//!
//! The format is `key = value` lines grouped under optional `[section]`
//! headers. `#` starts a comment. Unknown sections or keys, malformed
//! values and repeated keys are errors reported with their line number.
//!
//! Numeric grids accept a single value, a comma-separated list, or an
//! inclusive range `a..b step s` (step 1 when omitted), so `1..40 step 1`
//! has 40 points.
//!
//! Top-level keys (defaults in parentheses):
//! `scenario` (required), `gate` (required by gate scenarios),
//! `protocols` (CHRW, RWA-BS, RWA), `T` in units of π/ω (required where a
//! gate time is needed; a scan range for `sweep`), `samples` (4000),
//! `trace_points` (400), `floor` (0.9999), `confirm` (2), `k_max` (60),
//! `units` (dimensionless), `output` (none), `seed` (0).
//!
//! `[noise]`: `kind` (systematic), `targets` (Omega0, Delta), `rates`
//! (0), `segments` (100), `trials` (200).
//! `[decoherence]`: `gamma_hz` (25000), `drive_hz` (5e9), `grid` (20x20).
//! `[leakage]`: `gaps` (10), `coupling` (√2).
//! `[drive]`: `omega0` (0.1), `delta` (0.1), `duration` (200), `points`
//! (2000).
//! `[fluxonium]`: `E_C` (0.8), `E_L` (1.1), `E_J` (5), `phi_ext` (π),
//! `n_basis` (120).

use std::fmt::{self, Write as _};
use std::str::FromStr;

use chrw_core::fluxonium::FluxoniumParams;
use chrw_core::hamiltonians::ProtocolKind;
use chrw_core::noise::{NoiseKind, NoiseTarget, DEFAULT_SEGMENTS, DEFAULT_TRIALS};
use chrw_core::pulse_synthesis::{GatePreset, DEFAULT_SAMPLES};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Synthesize,
    Simulate,
    Sweep,
    Noise,
    Lindblad,
    Leakage,
    Fluxonium,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table1,
    Table2,
}

impl Scenario {
    pub const ALL: [Self; 16] = [
        Self::Synthesize,
        Self::Simulate,
        Self::Sweep,
        Self::Noise,
        Self::Lindblad,
        Self::Leakage,
        Self::Fluxonium,
        Self::Fig1,
        Self::Fig2,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
        Self::Fig7,
        Self::Table1,
        Self::Table2,
    ];

    pub const REPRODUCTIONS: [Self; 9] =
        [Self::Fig1, Self::Fig2, Self::Fig3, Self::Fig4, Self::Fig5, Self::Fig6, Self::Fig7, Self::Table1, Self::Table2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Synthesize => "synthesize",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Noise => "noise",
            Self::Lindblad => "lindblad",
            Self::Leakage => "leakage",
            Self::Fluxonium => "fluxonium",
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Table1 => "table1",
            Self::Table2 => "table2",
        }
    }

    pub fn needs_gate(self) -> bool {
        matches!(self, Self::Synthesize | Self::Simulate | Self::Sweep | Self::Noise | Self::Lindblad | Self::Leakage)
    }

    pub fn needs_time(self) -> bool {
        matches!(self, Self::Synthesize | Self::Simulate | Self::Sweep | Self::Lindblad | Self::Leakage)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown scenario '{}'", s.trim()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMode {
    Dimensionless,
    Physical,
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dimensionless => "dimensionless",
            Self::Physical => "physical",
        })
    }
}

impl FromStr for UnitMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "dimensionless" => Ok(Self::Dimensionless),
            "physical" => Ok(Self::Physical),
            other => Err(format!("unknown unit mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub kind: NoiseKind,
    pub targets: Vec<NoiseTarget>,
    pub rates: Vec<f64>,
    pub segments: usize,
    pub trials: usize,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            kind: NoiseKind::Systematic,
            targets: vec![NoiseTarget::Omega0, NoiseTarget::Detuning],
            rates: vec![0.0],
            segments: DEFAULT_SEGMENTS,
            trials: DEFAULT_TRIALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSection {
    pub gamma_hz: Vec<f64>,
    pub drive_hz: f64,
    pub grid: (usize, usize),
}

impl Default for DecoherenceSection {
    fn default() -> Self {
        Self { gamma_hz: vec![25e3], drive_hz: 5e9, grid: (20, 20) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageSection {
    pub gaps: Vec<f64>,
    pub coupling: f64,
}

impl Default for LeakageSection {
    fn default() -> Self {
        Self { gaps: vec![10.0], coupling: std::f64::consts::SQRT_2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSection {
    pub omega0: Vec<f64>,
    pub delta: f64,
    pub duration: f64,
    pub points: usize,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { omega0: vec![0.1], delta: 0.1, duration: 200.0, points: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub gate: Option<GatePreset>,
    pub protocols: Vec<ProtocolKind>,
    /// Gate times in units of `π/ω`.
    pub t: Vec<f64>,
    pub samples: usize,
    pub trace_points: usize,
    pub floor: f64,
    pub confirm: u32,
    pub k_max: u32,
    pub units: UnitMode,
    pub output: Option<String>,
    pub seed: u64,
    pub noise: NoiseSection,
    pub decoherence: DecoherenceSection,
    pub leakage: LeakageSection,
    pub drive: DriveSection,
    pub fluxonium: FluxoniumParams,
}

impl ExperimentConfig {
    /// All defaults for `scenario`; gate and times left empty.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            gate: None,
            protocols: ProtocolKind::ALL.to_vec(),
            t: Vec::new(),
            samples: DEFAULT_SAMPLES,
            trace_points: 400,
            floor: 0.9999,
            confirm: 2,
            k_max: 60,
            units: UnitMode::Dimensionless,
            output: None,
            seed: 0,
            noise: NoiseSection::default(),
            decoherence: DecoherenceSection::default(),
            leakage: LeakageSection::default(),
            drive: DriveSection::default(),
            fluxonium: FluxoniumParams::reference(),
        }
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "scenario = {}", self.scenario);
        if let Some(g) = self.gate {
            let _ = writeln!(s, "gate = {g}");
        }
        let protos: Vec<String> = self.protocols.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "protocols = {}", protos.join(", "));
        if !self.t.is_empty() {
            let _ = writeln!(s, "T = {}", list(&self.t));
        }
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "trace_points = {}", self.trace_points);
        let _ = writeln!(s, "floor = {:?}", self.floor);
        let _ = writeln!(s, "confirm = {}", self.confirm);
        let _ = writeln!(s, "k_max = {}", self.k_max);
        let _ = writeln!(s, "units = {}", self.units);
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {o}");
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let n = &self.noise;
        let targets: Vec<&str> = n.targets.iter().map(|t| t.name()).collect();
        let _ = writeln!(s, "\n[noise]\nkind = {}\ntargets = {}\nrates = {}\nsegments = {}\ntrials = {}",
            n.kind, targets.join(", "), list(&n.rates), n.segments, n.trials);
        let d = &self.decoherence;
        let _ = writeln!(s, "\n[decoherence]\ngamma_hz = {}\ndrive_hz = {:?}\ngrid = {}x{}", list(&d.gamma_hz), d.drive_hz, d.grid.0, d.grid.1);
        let _ = writeln!(s, "\n[leakage]\ngaps = {}\ncoupling = {:?}", list(&self.leakage.gaps), self.leakage.coupling);
        let dr = &self.drive;
        let _ = writeln!(s, "\n[drive]\nomega0 = {}\ndelta = {:?}\nduration = {:?}\npoints = {}", list(&dr.omega0), dr.delta, dr.duration, dr.points);
        let f = &self.fluxonium;
        let _ = writeln!(s, "\n[fluxonium]\nE_C = {:?}\nE_L = {:?}\nE_J = {:?}\nphi_ext = {:?}\nn_basis = {}", f.e_c, f.e_l, f.e_j, f.phi_ext, f.n_basis);
        s
    }
}

fn err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Config { line, message: message.into() }
}

fn scalar<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse::<T>().map_err(|_| err(line, format!("key '{key}': cannot parse '{}' as {}", v.trim(), std::any::type_name::<T>())))
}

fn named<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| err(line, format!("key '{key}': {e}")))
}

fn named_list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(err(line, format!("key '{key}': empty list element")));
    }
    items.into_iter().map(|s| named(line, key, s)).collect()
}

/// Parses a single number, a list `a, b, c`, or a range `a..b [step s]`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if let Some((range, step)) = split_range(text) {
        let (a, b) = range;
        let a: f64 = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
        let s: f64 = match step {
            Some(s) => s.trim().parse().map_err(|_| format!("bad step '{s}'"))?,
            None => 1.0,
        };
        if !(s > 0.0) || !(b >= a) {
            return Err(format!("range {a}..{b} step {s} is empty or has a non-positive step"));
        }
        let n = ((b - a) / s + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| a + i as f64 * s).collect());
    }
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number '{}'", x.trim())))
        .collect()
}

fn split_range(text: &str) -> Option<((&str, &str), Option<&str>)> {
    let (a, rest) = text.split_once("..")?;
    match rest.split_once("step") {
        Some((b, s)) => Some(((a, b), Some(s))),
        None => Some(((a, rest), None)),
    }
}

fn grid(line: usize, key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(v).map_err(|m| err(line, format!("key '{key}': {m}")))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Noise,
    Decoherence,
    Leakage,
    Drive,
    Fluxonium,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    parse_config_with(text, None)
}

/// Parses `text`; `scenario` supplies the scenario when the file omits it and
/// must agree with it otherwise.
pub fn parse_config_with(text: &str, scenario: Option<Scenario>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(Scenario::Table1);
    let mut section = Section::Top;
    let mut seen = std::collections::HashSet::new();
    let mut scenario_line = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(line, "unterminated section header"))?.trim();
            section = match name {
                "noise" => Section::Noise,
                "decoherence" => Section::Decoherence,
                "leakage" => Section::Leakage,
                "drive" => Section::Drive,
                "fluxonium" => Section::Fluxonium,
                other => return Err(err(line, format!("unknown section '[{other}]'"))),
            };
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(line, format!("expected 'key = value', found '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(line, format!("key '{key}' has an empty value")));
        }
        if !seen.insert((section as u8, key.to_string())) {
            return Err(err(line, format!("key '{key}' repeated")));
        }
        match (section, key) {
            (Section::Top, "scenario") => {
                cfg.scenario = named(line, key, value)?;
                scenario_line = Some(line);
            }
            (Section::Top, "gate") => cfg.gate = Some(named(line, key, value)?),
            (Section::Top, "protocols") => cfg.protocols = named_list(line, key, value)?,
            (Section::Top, "T") => cfg.t = grid(line, key, value)?,
            (Section::Top, "samples") => cfg.samples = scalar(line, key, value)?,
            (Section::Top, "trace_points") => cfg.trace_points = scalar(line, key, value)?,
            (Section::Top, "floor") => cfg.floor = scalar(line, key, value)?,
            (Section::Top, "confirm") => cfg.confirm = scalar(line, key, value)?,
            (Section::Top, "k_max") => cfg.k_max = scalar(line, key, value)?,
            (Section::Top, "units") => cfg.units = named(line, key, value)?,
            (Section::Top, "output") => cfg.output = Some(value.to_string()),
            (Section::Top, "seed") => cfg.seed = scalar(line, key, value)?,
            (Section::Noise, "kind") => cfg.noise.kind = named(line, key, value)?,
            (Section::Noise, "targets") => cfg.noise.targets = named_list(line, key, value)?,
            (Section::Noise, "rates") => cfg.noise.rates = grid(line, key, value)?,
            (Section::Noise, "segments") => cfg.noise.segments = scalar(line, key, value)?,
            (Section::Noise, "trials") => cfg.noise.trials = scalar(line, key, value)?,
            (Section::Decoherence, "gamma_hz") => cfg.decoherence.gamma_hz = grid(line, key, value)?,
            (Section::Decoherence, "drive_hz") => cfg.decoherence.drive_hz = scalar(line, key, value)?,
            (Section::Decoherence, "grid") => {
                let (a, b) = value.split_once('x').ok_or_else(|| err(line, "grid must be written as NxM"))?;
                cfg.decoherence.grid = (scalar(line, key, a)?, scalar(line, key, b)?);
            }
            (Section::Leakage, "gaps") => cfg.leakage.gaps = grid(line, key, value)?,
            (Section::Leakage, "coupling") => cfg.leakage.coupling = scalar(line, key, value)?,
            (Section::Drive, "omega0") => cfg.drive.omega0 = grid(line, key, value)?,
            (Section::Drive, "delta") => cfg.drive.delta = scalar(line, key, value)?,
            (Section::Drive, "duration") => cfg.drive.duration = scalar(line, key, value)?,
            (Section::Drive, "points") => cfg.drive.points = scalar(line, key, value)?,
            (Section::Fluxonium, "E_C") => cfg.fluxonium.e_c = scalar(line, key, value)?,
            (Section::Fluxonium, "E_L") => cfg.fluxonium.e_l = scalar(line, key, value)?,
            (Section::Fluxonium, "E_J") => cfg.fluxonium.e_j = scalar(line, key, value)?,
            (Section::Fluxonium, "phi_ext") => cfg.fluxonium.phi_ext = scalar(line, key, value)?,
            (Section::Fluxonium, "n_basis") => cfg.fluxonium.n_basis = scalar(line, key, value)?,
            _ => return Err(err(line, format!("unknown key '{key}'"))),
        }
    }
    let end = last_line + 1;
    match (scenario_line, scenario) {
        (None, None) => return Err(err(end, "missing required key 'scenario'")),
        (None, Some(s)) => cfg.scenario = s,
        (Some(line), Some(s)) if s != cfg.scenario => {
            return Err(err(line, format!("config scenario '{}' does not match requested '{s}'", cfg.scenario)));
        }
        _ => {}
    }
    if cfg.scenario.needs_gate() && cfg.gate.is_none() {
        return Err(err(end, format!("missing required key 'gate' for scenario '{}'", cfg.scenario)));
    }
    if cfg.scenario.needs_time() && cfg.t.is_empty() {
        return Err(err(end, format!("missing required key 'T' for scenario '{}'", cfg.scenario)));
    }
    if cfg.protocols.is_empty() {
        return Err(err(end, "protocol set is empty"));
    }
    Ok(cfg)
}
