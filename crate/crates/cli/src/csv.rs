// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV emission: `#`-prefixed metadata, one header row, then data rows.
//! Floats are written in scientific notation with 12 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Self::Int(i64::from(x))
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

/// Ordered `key = value` pairs written as `# key = value`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    /// Version, SHA-256 of the canonical config text, and seed.
    pub fn for_run(config_text: &str, seed: u64) -> Self {
        let digest = Sha256::digest(config_text.as_bytes());
        let hex = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self(vec![
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("config_sha256".into(), hex),
            ("seed".into(), seed.to_string()),
        ])
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn render(table: &Table, meta: &Metadata) -> Result<String, CliError> {
    let mut out = String::new();
    for (k, v) in &meta.0 {
        if v.contains('\n') {
            return Err(CliError::Output(format!("metadata value for '{k}' spans lines")));
        }
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != table.columns.len() {
            return Err(CliError::Output(format!("row {i} has {} cells for {} columns", row.len(), table.columns.len())));
        }
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => Ok(format_number(*x)),
                Cell::Int(n) => Ok(n.to_string()),
                Cell::Text(s) if s.contains([',', '\n', '"']) => Err(CliError::Output(format!("text cell '{s}' needs quoting"))),
                Cell::Text(s) => Ok(s.clone()),
            })
            .collect::<Result<_, _>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, table: &Table, meta: &Metadata) -> Result<(), CliError> {
    let text = render(table, meta)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        let s = format_number(std::f64::consts::PI);
        assert_eq!(s, "3.14159265359e0");
        let back: f64 = s.parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() <= 5e-12 * std::f64::consts::PI);
    }

    #[test]
    fn empty_table_has_header_and_metadata_only() {
        let text = render(&Table::new(&["a", "b"]), &Metadata::for_run("x", 3)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[..3].iter().all(|l| l.starts_with("# ")));
        assert_eq!(lines[3], "a,b");
    }

    #[test]
    fn ragged_rows_and_commas_are_rejected() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0.into()]);
        assert!(render(&t, &Metadata::default()).is_err());
        let mut t = Table::new(&["a"]);
        t.push(vec!["x,y".into()]);
        assert!(render(&t, &Metadata::default()).is_err());
    }

    #[test]
    fn hash_depends_on_config() {
        let a = Metadata::for_run("scenario = fig1", 0);
        let b = Metadata::for_run("scenario = fig2", 0);
        assert_ne!(a.get("config_sha256"), b.get("config_sha256"));
        assert_eq!(a.get("config_sha256").unwrap().len(), 64);
    }
}
