//! Shared vocabulary for system-level properties and verdict outcomes.

use serde::{Deserialize, Serialize};

/// The four uniformity properties a modulus scan can target. Each pairs an
/// epsilon/delta quantifier structure with one estimator:
/// plain equicontinuity uses the sup of pointwise orbit distances, `MeanEq`
/// the limsup of prefix-averaged distances, `EqInMean` the sup of prefix
/// averages over every horizon, and `WeylMeanEq` the limsup of averages over
/// sliding windows of growing length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Equicontinuous,
    MeanEq,
    EqInMean,
    WeylMeanEq,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 4] = [
        PropertyKind::Equicontinuous,
        PropertyKind::MeanEq,
        PropertyKind::EqInMean,
        PropertyKind::WeylMeanEq,
    ];

    pub fn key(self) -> &'static str {
        match self {
            PropertyKind::Equicontinuous => "equicontinuous",
            PropertyKind::MeanEq => "mean_eq",
            PropertyKind::EqInMean => "eq_in_mean",
            PropertyKind::WeylMeanEq => "weyl_mean_eq",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == s)
    }
}

impl std::fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

/// Finite-horizon verdict for a system-level property. `CertifiedAtScale`
/// means every grid cell passed at the recorded horizons and budgets; it is
/// explicitly not a proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    CertifiedAtScale,
    Refuted,
    Inconclusive,
}

/// Catalog metadata: the classification we expect a scan to reproduce.
/// Estimators never read these; only harnesses compare against them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    True,
    False,
    Unknown,
}
