//! Result files: records as CSV or JSON, `summary.json`, `timings.json`.
//!
//! Floats in CSV use `{:.16e}` (17 significant digits), which re-parses to
//! the identical `f64`. JSON uses serde_json's shortest round-trip form.

use std::path::{Path, PathBuf};

use mpjc::scan::ScanRecord;
use serde::Serialize;

use crate::CliError;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("cannot write {}: {e}", path.display()))
}

/// Header for scan records with `phi_axes` extra angles and the given name
/// for the merit column.
pub fn record_header(phi_axes: usize, merit: &str) -> Vec<String> {
    let mut h = vec!["tauIndex".to_string(), "thetaIndex".to_string()];
    h.extend((1..=phi_axes).map(|i| if phi_axes == 1 { "phiIndex".to_string() } else { format!("phi{i}Index") }));
    h.extend(["tau".to_string(), "theta".to_string()]);
    h.extend((1..=phi_axes).map(|i| if phi_axes == 1 { "phi".to_string() } else { format!("phi{i}") }));
    h.extend([merit.to_string(), "pass1em4".to_string(), "pass1em6".to_string()]);
    h
}

pub fn record_row(r: &ScanRecord) -> Vec<String> {
    let mut row: Vec<String> = r.indices.iter().map(|i| i.to_string()).collect();
    row.extend(r.values.iter().map(|&v| float(v)));
    row.push(float(r.merit));
    row.push(r.pass_1em4.to_string());
    row.push(r.pass_1em6.to_string());
    row
}

pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: Option<&str>) -> Result<Self, CliError> {
        match s.unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Validation(format!("format must be csv or json, got `{other}`"))),
        }
    }
}

/// Where and how one run writes its files.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
    pub name: String,
    pub format: Format,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, name: String, format: Format) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| io_err(d, e))?;
        }
        Ok(Self { dir, name, format })
    }

    fn path(&self, file: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(file))
    }

    /// Writes records as `<name>.csv` (via `header`/`row`) or `<name>.json`.
    pub fn records<T: Serialize>(
        &self,
        records: &[T],
        header: &[String],
        row: impl Fn(&T) -> Vec<String>,
    ) -> Result<(), CliError> {
        match self.format {
            Format::Csv => match self.path(&format!("{}.csv", self.name)) {
                Some(p) => write_csv(&p, header, records.iter().map(row)),
                None => Ok(()),
            },
            Format::Json => match self.path(&format!("{}.json", self.name)) {
                Some(p) => write_json(&p, records),
                None => Ok(()),
            },
        }
    }

    pub fn summary<T: Serialize>(&self, summary: &T) -> Result<(), CliError> {
        match self.path("summary.json") {
            Some(p) => write_json(&p, summary),
            None => Ok(()),
        }
    }

    /// Wall-clock seconds per phase, kept apart from `summary.json` so the
    /// summary stays byte-identical across runs.
    pub fn timings(&self, phases: &[(&str, f64)]) -> Result<(), CliError> {
        match self.path("timings.json") {
            Some(p) => {
                let map: serde_json::Map<String, serde_json::Value> =
                    phases.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
                write_json(&p, &map)
            }
            None => Ok(()),
        }
    }
}
