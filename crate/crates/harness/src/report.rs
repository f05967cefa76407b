//! CSV row types and I/O.
//!
//! Floats are written with the shortest representation that parses back
//! to the same value, so emitted files round-trip exactly.

use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::DetectorKind;
use crate::{HarnessError, Result};

/// One aggregated sweep point. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub detector: DetectorKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub snr_db: f64,
    pub order: usize,
    pub mu: f64,
    pub iters: usize,
    /// Empty when the run is not a sweep.
    pub sweep_name: String,
    pub sweep_value: Option<f64>,
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    /// Half-width of the 95% Wilson interval on `error_rate`.
    pub wilson_halfwidth: f64,
    pub analytic_p_ie: Option<f64>,
    pub mean_runtime_ns: f64,
    pub median_runtime_ns: f64,
    pub seed: u64,
}

pub const SWEEP_COLUMNS: [&str; 19] = [
    "detector",
    "N",
    "L",
    "K",
    "M",
    "snr_db",
    "order",
    "mu",
    "iters",
    "sweep_name",
    "sweep_value",
    "trials",
    "errors",
    "error_rate",
    "wilson_halfwidth",
    "analytic_p_ie",
    "mean_runtime_ns",
    "median_runtime_ns",
    "seed",
];

/// Output of the `analyze` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub snr_db: f64,
    pub alpha_bar: f64,
    pub omega_bar: f64,
    pub lambda_star: f64,
    pub exponent: f64,
    pub pep: f64,
    pub p_ie: f64,
}

pub const ANALYTIC_COLUMNS: [&str; 12] = [
    "N",
    "L",
    "K",
    "Q",
    "M",
    "snr_db",
    "alpha_bar",
    "omega_bar",
    "lambda_star",
    "exponent",
    "pep",
    "p_ie",
];

/// One `q_l` value of a CAVI trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub trial: u64,
    /// 0 is the initial point.
    pub iteration: usize,
    /// 1-based.
    pub antenna: usize,
    pub q: f64,
    pub active: bool,
}

pub const CONVERGENCE_COLUMNS: [&str; 5] = ["trial", "iteration", "antenna", "q", "active"];

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], header: &[&str], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(rows: &[T], header: &[&str], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, header, std::io::BufWriter::new(file)).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the sweep table; an empty slice gives a header-only file.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    emit(rows, &SWEEP_COLUMNS, path)
}

pub fn emit_analytic_csv(rows: &[AnalyticRow], path: &Path) -> Result<()> {
    emit(rows, &ANALYTIC_COLUMNS, path)
}

pub fn emit_convergence_csv(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    emit(rows, &CONVERGENCE_COLUMNS, path)
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(csv_err)
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(path)
}
