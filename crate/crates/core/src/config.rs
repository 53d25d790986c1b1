//! Experiment configuration: one TOML file, everything explicit, the RNG
//! seed mandatory so every run is reproducible.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::CatalogConfig;
use crate::error::{Error, Result};
use crate::prop::PropertyKind;

pub const KNOWN_CHECKS: [&str; 4] =
    ["equivalences", "uniform_window", "unique_ergodicity", "relations"];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every randomized stage derives its stream from it.
    pub rng_seed: u64,
    /// Catalog ids to analyze.
    pub systems: Vec<String>,
    /// Properties to scan.
    #[serde(default = "default_properties")]
    pub properties: Vec<String>,
    /// Extra suites to run on top of the scans.
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub catalog: CatalogConfig,
}

fn default_properties() -> Vec<String> {
    vec!["mean_eq".into(), "eq_in_mean".into(), "weyl_mean_eq".into()]
}

fn default_checks() -> Vec<String> {
    vec!["equivalences".into(), "unique_ergodicity".into()]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Decreasing; defaults to 2^-1 .. 2^-6.
    pub eps: Vec<f64>,
    /// Decreasing; defaults to 2^-1 .. 2^-20.
    pub delta: Vec<f64>,
    pub horizon_numeric: usize,
    pub horizon_symbolic: usize,
    pub pair_budget: usize,
    /// Time budget for pair-relation searches.
    pub search_budget: usize,
    /// Horizon for the pairwise relation tests.
    pub relation_horizon: usize,
    /// Eps list for the pairwise relation tests; decreasing.
    pub relation_eps: Vec<f64>,
    /// Candidate minimal window lengths for the uniform-window check.
    pub min_len_grid: Vec<usize>,
    /// Sample points per system for the unique-ergodicity check.
    pub ue_points: usize,
    /// Sampled pairs per system for the relation suite.
    pub relation_pairs: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            eps: (1..=6).map(|k| 2f64.powi(-k)).collect(),
            delta: (1..=20).map(|k| 2f64.powi(-k)).collect(),
            horizon_numeric: 100_000,
            horizon_symbolic: 1_000_000,
            pair_budget: 64,
            search_budget: 4096,
            relation_horizon: 10_000,
            relation_eps: (2..=8).map(|k| 2f64.powi(-k)).collect(),
            min_len_grid: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024],
            ue_points: 6,
            relation_pairs: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub dir: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { format: OutputFormat::Json, dir: None }
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.systems.is_empty() {
            return Err(Error::InvalidConfig("field 'systems': must not be empty".into()));
        }
        for p in &self.properties {
            if PropertyKind::parse(p).is_none() {
                return Err(Error::InvalidConfig(format!(
                    "field 'properties': unknown property '{p}'"
                )));
            }
        }
        for c in &self.checks {
            if !KNOWN_CHECKS.contains(&c.as_str()) {
                return Err(Error::InvalidConfig(format!("field 'checks': unknown check '{c}'")));
            }
        }
        let g = &self.grids;
        let dec = |xs: &[f64]| !xs.is_empty() && xs.windows(2).all(|w| w[0] > w[1]);
        if !dec(&g.eps) || g.eps.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidConfig(
                "field 'grids.eps': must be positive and decreasing".into(),
            ));
        }
        if !dec(&g.delta) || g.delta.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidConfig(
                "field 'grids.delta': must be positive and decreasing".into(),
            ));
        }
        if !dec(&g.relation_eps) {
            return Err(Error::InvalidConfig(
                "field 'grids.relation_eps': must be positive and decreasing".into(),
            ));
        }
        for (name, v) in [
            ("grids.horizon_numeric", g.horizon_numeric),
            ("grids.horizon_symbolic", g.horizon_symbolic),
            ("grids.pair_budget", g.pair_budget),
            ("grids.search_budget", g.search_budget),
            ("grids.relation_horizon", g.relation_horizon),
            ("grids.relation_pairs", g.relation_pairs),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("field '{name}': must be positive")));
            }
        }
        if g.ue_points < 2 {
            return Err(Error::InvalidConfig(
                "field 'grids.ue_points': need at least two sample points".into(),
            ));
        }
        if g.min_len_grid.is_empty() || g.min_len_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "field 'grids.min_len_grid': must be increasing and non-empty".into(),
            ));
        }
        Ok(())
    }

    pub fn properties_parsed(&self) -> Vec<PropertyKind> {
        self.properties.iter().filter_map(|p| PropertyKind::parse(p)).collect()
    }

    pub fn has_check(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c == name)
    }
}
