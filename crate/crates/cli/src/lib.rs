// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, CSV output and scenario orchestration for the `chrw`
//! command-line tool.

pub mod config;
pub mod csv;
pub mod error;
pub mod scenarios;

pub use config::{parse_config, parse_config_with, ExperimentConfig, Scenario};
pub use error::CliError;
pub use scenarios::{reproduction_config, run_scenario, RunOptions};
