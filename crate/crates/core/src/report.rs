//! Report assembly and serialization. Everything except the `meta` block is
//! a pure function of (config, seed), so two runs with the same config are
//! byte-identical after dropping `meta`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::SystemFlags;
use crate::checker::{
    EquivalenceReport, FixedPointReport, SystemVerdict, UniformWindowReport,
};
use crate::config::{ExperimentConfig, OutputFormat};
use crate::ergodic::UniqueErgodicityReport;
use crate::error::Result;
use crate::prop::Expectation;
use crate::proximal::PairVerdict;
use crate::space::SpaceKind;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Meta {
    pub timestamp_unix_s: u64,
    pub wall_time_ms: u64,
}

/// A plot-ready partial curve addressable by id.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series {
    pub id: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemReport {
    pub id: String,
    pub kind: SpaceKind,
    pub flags: SystemFlags,
    pub expected: BTreeMap<String, Expectation>,
    pub horizon: usize,
    pub used_twin: bool,
    pub verdicts: Vec<SystemVerdict>,
    pub equivalences: Vec<EquivalenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_window: Option<UniformWindowReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique_ergodicity: Option<UniqueErgodicityReport>,
    pub relations: Vec<PairVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointReport>,
    /// Scan outcomes that disagree with the recorded expectations; phrased
    /// as expectation mismatches because the expectations are metadata.
    pub expectation_mismatches: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub config: ExperimentConfig,
    pub systems: Vec<SystemReport>,
    /// Count of hard cross-check contradictions (both sides conclusive and
    /// disagreeing).
    pub contradictions: usize,
    pub series: Vec<Series>,
    pub meta: Meta,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes report.json (and series.csv when requested); returns the report
/// path.
pub fn write_report(report: &Report, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("report.json");
    std::fs::write(&path, report.to_json()?)?;
    match report.config.output.format {
        OutputFormat::Csv | OutputFormat::Both => {
            let mut csv = String::from("series,x,y\n");
            for s in &report.series {
                for (x, y) in &s.points {
                    csv.push_str(&format!("{},{},{}\n", s.id, fmt_f64(*x), fmt_f64(*y)));
                }
            }
            std::fs::write(dir.join("series.csv"), csv)?;
        }
        OutputFormat::Json => {}
    }
    Ok(path)
}

pub fn fmt_f64(x: f64) -> String {
    // shortest round-trip formatting, deterministic across runs
    format!("{x:?}")
}

/// The report with its volatile block removed, for byte comparisons.
pub fn normalized_json(report_text: &str) -> Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(report_text)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("meta");
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Series whose id contains the selector; exact id matches win.
pub fn select_series<'r>(report: &'r Report, selector: &str) -> Vec<&'r Series> {
    if let Some(s) = report.series.iter().find(|s| s.id == selector) {
        return vec![s];
    }
    report.series.iter().filter(|s| s.id.contains(selector)).collect()
}

pub fn series_to_csv(series: &[&Series]) -> String {
    let mut out = String::from("series,x,y\n");
    for s in series {
        for (x, y) in &s.points {
            out.push_str(&format!("{},{},{}\n", s.id, fmt_f64(*x), fmt_f64(*y)));
        }
    }
    out
}
