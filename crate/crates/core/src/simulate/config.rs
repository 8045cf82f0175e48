//! Experiment configuration: parsing (JSON or TOML) and exhaustive
//! validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::graph::DegreeDistribution;
use crate::mechanisms::{MechanismTag, DEFAULT_MWIS_CAP};
use crate::simulate::bids::BidModel;
use crate::simulate::SimError;

/// Where each replication's conflict graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    Generate {
        n: usize,
        support: Vec<usize>,
        pmf: Vec<f64>,
        /// Fresh topology per replication instead of one shared topology.
        #[serde(default)]
        per_replication: bool,
    },
}

/// Whether the conflict-free grouping is re-drawn every frame (the default)
/// or fixed once per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupingPolicy {
    #[default]
    PerFrame,
    FixedPerRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Allocation frames per replication.
    pub frames: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub mechanisms: Vec<MechanismTag>,
    /// Master seed; every other random stream is derived from it.
    pub seed: u64,
    #[serde(default)]
    pub grouping: GroupingPolicy,
    pub graph: GraphSource,
    pub bids: BidModel,
    /// Diagnostic override: use these bids in every frame instead of the
    /// bid model.
    #[serde(default)]
    pub fixed_bids: Option<Vec<f64>>,
    /// Diagnostic override: pin the grouping instead of randomizing it.
    #[serde(default)]
    pub partition: Option<Vec<Vec<usize>>>,
}

fn default_replications() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .map(|ext| ext.eq_ignore_ascii_case("json"))
            .unwrap_or(false);
        let cfg: Self = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| SimError::ConfigParse(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| SimError::ConfigParse(format!("{}: {e}", path.display())))?
        };
        Ok(cfg)
    }

    /// Collects every validation failure (not just the first).
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.frames == 0 {
            errs.push("frames must be >= 1".to_string());
        }
        if self.replications == 0 {
            errs.push("replications must be >= 1".to_string());
        }
        if self.mechanisms.is_empty() {
            errs.push("at least one mechanism is required".to_string());
        }
        let mut seen = Vec::new();
        for &m in &self.mechanisms {
            if seen.contains(&m) {
                errs.push(format!("mechanism {m} listed more than once"));
            }
            seen.push(m);
        }
        errs.extend(self.bids.validation_errors());
        if let GraphSource::Generate {
            n, support, pmf, ..
        } = &self.graph
        {
            if *n < 2 {
                errs.push(format!("generated graphs need n >= 2, got {n}"));
            }
            if let Err(e) = DegreeDistribution::new(support.clone(), pmf.clone()) {
                errs.push(e.to_string());
            }
            if self.mechanisms.contains(&MechanismTag::Vcg) && *n > DEFAULT_MWIS_CAP {
                errs.push(format!(
                    "vcg requires n <= {DEFAULT_MWIS_CAP}, config generates n = {n}"
                ));
            }
        }
        if let Some(bids) = &self.fixed_bids {
            if bids.iter().any(|&b| !(b.is_finite() && b > 0.0)) {
                errs.push("fixed_bids must all be positive and finite".to_string());
            }
        }
        if let Some(groups) = &self.partition {
            if groups.iter().all(|g| g.is_empty()) {
                errs.push("injected partition has no members".to_string());
            }
        }
        errs
    }
}
