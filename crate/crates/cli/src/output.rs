//! Deterministic file output: time-series CSV and JSON reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use dfs_core::{Sample, TrajectoryRecord};
use serde::{Deserialize, Serialize};

pub const TIMESERIES_HEADER: &str = "t_gamma,purity,overlap_current,overlap_target,drive_abs,trace_drift";

/// Twelve significant digits in scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn timeseries_csv(samples: &[Sample]) -> String {
    let mut out = String::with_capacity(96 * (samples.len() + 1));
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for s in samples {
        let row = [s.t_gamma, s.purity, s.overlap_current, s.overlap_target, s.drive_abs, s.trace_drift];
        let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_timeseries(traj: &TrajectoryRecord, path: &Path) -> io::Result<()> {
    if traj.samples.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "trajectory has no samples"));
    }
    write_file(path, &timeseries_csv(&traj.samples))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)
}

/// One row of a result table. Times are in units of `1/Γ_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub protocol: String,
    pub t_f: f64,
    pub purity: f64,
    /// Overlap with the target DFS at `μ = 1`.
    pub overlap_target: f64,
    /// Overlap with the DFS at the final pump ratio `μ(t_f)`.
    pub overlap_current: f64,
    pub meets_threshold: bool,
}

impl SummaryRow {
    pub fn text_header() -> &'static str {
        "protocol           t_f        purity    F(1)      F(mu(t_f))  ok"
    }

    pub fn text_line(&self) -> String {
        format!(
            "{:<18} {:<10} {:<9.6} {:<9.6} {:<11.6} {}",
            self.protocol,
            format!("{}", self.t_f),
            self.purity,
            self.overlap_target,
            self.overlap_current,
            if self.meets_threshold { "yes" } else { "no" }
        )
    }
}

/// Operating point derived from a `[physical]` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappedPoint {
    pub gamma_c: f64,
    pub mu: f64,
    pub chi: f64,
    pub detuning_ratio: f64,
    pub regime_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStateReport {
    pub name: String,
    pub atoms: usize,
    pub charge: i64,
    pub summary: SummaryRow,
    /// Pump ratio whose eigenstates the populations refer to.
    pub mu_final: f64,
    /// Population of each normalised eigenstate in the target DFS, keyed by
    /// `(k₋₁,k₀,k₊₁)`.
    pub populations: BTreeMap<String, f64>,
    pub steps: usize,
    pub dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<MappedPoint>,
    pub timeseries: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u8,
    pub atoms: usize,
    pub charge: i64,
    pub detuning_ratio: f64,
    pub rows: Vec<SummaryRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub name: String,
    pub protocol: String,
    pub atoms: usize,
    pub charge: i64,
    pub t_f: f64,
    /// `μ_q` for quenches, `β = 1/t_f` otherwise.
    pub control: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructurePoint {
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
    pub charge: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEntry {
    pub charge: i64,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub atoms: usize,
    pub points: Vec<StructurePoint>,
    pub dimensions: Vec<DimensionEntry>,
}
