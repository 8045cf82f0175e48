//! Repeated-auction Monte Carlo harness.
//!
//! Runs the configured mechanisms over `frames` allocation frames per
//! replication with truthful bidding (justified by strategy-proofness),
//! accumulating welfare, utilization and fairness metrics. Everything is
//! derived deterministically from the master seed.

mod bids;
mod config;
mod output;
mod probe;

pub use bids::{BidModel, BidSampler};
pub use config::{ExperimentConfig, GraphSource, GroupingPolicy};
pub use output::{sig6, summary_json, write_frames_csv};
pub use probe::{
    probe_mechanism, strategy_proofness_probe, ProbeReport, ProbeViolation, PROBE_TOLERANCE,
};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    generate_configuration_model, load_graph, ConflictGraph, DegreeDistribution, GraphError,
};
use crate::mechanisms::{
    conflict_free_grouping, run_mechanism, GroupPartition, MechanismError, MechanismTag,
    ValueVector,
};
use crate::metrics::{jain_index, MetricsReport};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid experiment config:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),
    #[error("failed to parse experiment config: {0}")]
    ConfigParse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

// Independent random streams derived from the master seed.
const GRAPH_STREAM: u64 = 0x01;
const PARTITION_STREAM: u64 = 0x02;
const BIDS_STREAM: u64 = 0x03;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed for (master, stream, replication, frame).
pub fn derive_seed(master: u64, stream: u64, replication: u64, frame: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream ^ splitmix64(replication ^ splitmix64(frame))))
}

/// Per-mechanism results of one replication.
#[derive(Debug, Clone, Serialize)]
pub struct MechanismRun {
    pub mechanism: MechanismTag,
    pub frames: Vec<MetricsReport>,
    pub summary: MechanismSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct MechanismSummary {
    pub mechanism: MechanismTag,
    pub mean_welfare: f64,
    pub mean_utilization: f64,
    /// Fraction of frames each user was allocated.
    pub allocation_fractions: Vec<f64>,
    /// Jain index of the final allocation fractions; 0.0 when the mechanism
    /// never allocated anyone.
    pub jain_index: f64,
    pub mean_price: Vec<f64>,
    pub mean_utility: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicationResult {
    pub replication: usize,
    pub n: usize,
    pub mechanisms: Vec<MechanismRun>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MechanismAggregate {
    pub mechanism: MechanismTag,
    /// Mean over replications of the per-replication mean welfare.
    pub mean_welfare: f64,
    pub mean_utilization: f64,
    pub mean_jain: f64,
    /// Per-user means; present only when all replications share one
    /// topology.
    pub per_user_mean_price: Option<Vec<f64>>,
    pub per_user_mean_utility: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub per_mechanism: Vec<MechanismAggregate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub master_seed: u64,
    pub frames: usize,
    pub replications: Vec<ReplicationResult>,
    pub summary: ExperimentSummary,
}

struct Accumulator {
    allocation_counts: Vec<usize>,
    price_sums: Vec<f64>,
    utility_sums: Vec<f64>,
    welfare_sum: f64,
    utilization_sum: usize,
    frames: Vec<MetricsReport>,
}

impl Accumulator {
    fn new(n: usize, frames: usize) -> Self {
        Self {
            allocation_counts: vec![0; n],
            price_sums: vec![0.0; n],
            utility_sums: vec![0.0; n],
            welfare_sum: 0.0,
            utilization_sum: 0,
            frames: Vec::with_capacity(frames),
        }
    }

    fn finish(self, mechanism: MechanismTag, total_frames: usize) -> MechanismRun {
        let t = total_frames as f64;
        let fractions: Vec<f64> = self
            .allocation_counts
            .iter()
            .map(|&c| c as f64 / t)
            .collect();
        let summary = MechanismSummary {
            mechanism,
            mean_welfare: self.welfare_sum / t,
            mean_utilization: self.utilization_sum as f64 / t,
            jain_index: jain_index(&fractions).unwrap_or(0.0),
            allocation_fractions: fractions,
            mean_price: self.price_sums.iter().map(|&s| s / t).collect(),
            mean_utility: self.utility_sums.iter().map(|&s| s / t).collect(),
        };
        MechanismRun {
            mechanism,
            frames: self.frames,
            summary,
        }
    }
}

/// Runs the full experiment described by `cfg`.
pub fn run_repeated_auction(cfg: &ExperimentConfig) -> Result<ExperimentResult, SimError> {
    let issues = cfg.validation_errors();
    if !issues.is_empty() {
        return Err(SimError::InvalidConfig(issues));
    }
    let master = cfg.seed;

    let shared_graph: Option<ConflictGraph> = match &cfg.graph {
        GraphSource::File { path } => Some(load_graph(path)?),
        GraphSource::Generate {
            n,
            support,
            pmf,
            per_replication: false,
        } => {
            let dist = DegreeDistribution::new(support.clone(), pmf.clone())?;
            Some(generate_configuration_model(
                *n,
                &dist,
                derive_seed(master, GRAPH_STREAM, 0, 0),
            )?)
        }
        GraphSource::Generate { .. } => None,
    };

    let mut replications = Vec::with_capacity(cfg.replications);
    for rep in 0..cfg.replications {
        let graph = match &shared_graph {
            Some(g) => g.clone(),
            None => {
                let GraphSource::Generate {
                    n, support, pmf, ..
                } = &cfg.graph
                else {
                    unreachable!("file sources are always shared");
                };
                let dist = DegreeDistribution::new(support.clone(), pmf.clone())?;
                generate_configuration_model(
                    *n,
                    &dist,
                    derive_seed(master, GRAPH_STREAM, rep as u64, 0),
                )?
            }
        };
        replications.push(run_replication(cfg, &graph, rep)?);
    }

    let summary = aggregate(cfg, &replications, shared_graph.is_some());
    Ok(ExperimentResult {
        master_seed: master,
        frames: cfg.frames,
        replications,
        summary,
    })
}

fn run_replication(
    cfg: &ExperimentConfig,
    graph: &ConflictGraph,
    rep: usize,
) -> Result<ReplicationResult, SimError> {
    let n = graph.n();
    let master = cfg.seed;

    if let Some(bids) = &cfg.fixed_bids {
        if bids.len() != n {
            return Err(SimError::InvalidConfig(vec![format!(
                "fixed_bids has {} entries but the graph has {n} users",
                bids.len()
            )]));
        }
    }
    let injected: Option<GroupPartition> = match &cfg.partition {
        Some(groups) => Some(GroupPartition::new(graph, groups.clone())?),
        None => None,
    };
    let fixed_partition: Option<GroupPartition> = match (&injected, cfg.grouping) {
        (Some(p), _) => Some(p.clone()),
        (None, GroupingPolicy::FixedPerRun) => Some(conflict_free_grouping(
            graph,
            derive_seed(master, PARTITION_STREAM, rep as u64, u64::MAX),
        )),
        (None, GroupingPolicy::PerFrame) => None,
    };

    let mut sampler = BidSampler::new(&cfg.bids, n, derive_seed(master, BIDS_STREAM, rep as u64, 0));
    let mut accumulators: Vec<Accumulator> = cfg
        .mechanisms
        .iter()
        .map(|_| Accumulator::new(n, cfg.frames))
        .collect();

    for frame in 0..cfg.frames {
        let bids = match &cfg.fixed_bids {
            Some(fixed) => crate::mechanisms::BidVector::new(fixed.clone())?,
            None => sampler.draw_bids(frame),
        };
        // Truthful bidding: valuations equal bids.
        let values = ValueVector::new(bids.as_slice().to_vec())?;
        let partition = match &fixed_partition {
            Some(p) => p.clone(),
            None => conflict_free_grouping(
                graph,
                derive_seed(master, PARTITION_STREAM, rep as u64, frame as u64),
            ),
        };

        for (mech_idx, &mechanism) in cfg.mechanisms.iter().enumerate() {
            let outcome = run_mechanism(mechanism, graph, &bids, Some(&partition))?;
            let acc = &mut accumulators[mech_idx];
            for i in outcome.allocation.allocated() {
                acc.allocation_counts[i - 1] += 1;
                acc.price_sums[i - 1] += outcome.price(i);
            }
            let report = MetricsReport::for_frame(&outcome, &values, &acc.allocation_counts, frame + 1);
            for (sum, u) in acc.utility_sums.iter_mut().zip(&report.per_user_utility) {
                *sum += u;
            }
            acc.welfare_sum += report.social_welfare;
            acc.utilization_sum += report.utilization;
            acc.frames.push(report);
        }
    }

    let mechanisms = accumulators
        .into_iter()
        .zip(&cfg.mechanisms)
        .map(|(acc, &mechanism)| acc.finish(mechanism, cfg.frames))
        .collect();
    Ok(ReplicationResult {
        replication: rep,
        n,
        mechanisms,
    })
}

fn aggregate(
    cfg: &ExperimentConfig,
    replications: &[ReplicationResult],
    shared_topology: bool,
) -> ExperimentSummary {
    let reps = replications.len() as f64;
    let per_mechanism = cfg
        .mechanisms
        .iter()
        .enumerate()
        .map(|(mech_idx, &mechanism)| {
            let summaries = replications
                .iter()
                .map(|r| &r.mechanisms[mech_idx].summary);
            let mut mean_welfare = 0.0;
            let mut mean_utilization = 0.0;
            let mut mean_jain = 0.0;
            for s in summaries.clone() {
                mean_welfare += s.mean_welfare;
                mean_utilization += s.mean_utilization;
                mean_jain += s.jain_index;
            }
            let per_user = |field: fn(&MechanismSummary) -> &Vec<f64>| {
                if !shared_topology {
                    return None;
                }
                let n = replications[0].n;
                let mut sums = vec![0.0; n];
                for s in summaries.clone() {
                    for (acc, v) in sums.iter_mut().zip(field(s)) {
                        *acc += v;
                    }
                }
                Some(sums.into_iter().map(|s| s / reps).collect())
            };
            MechanismAggregate {
                mechanism,
                mean_welfare: mean_welfare / reps,
                mean_utilization: mean_utilization / reps,
                mean_jain: mean_jain / reps,
                per_user_mean_price: per_user(|s| &s.mean_price),
                per_user_mean_utility: per_user(|s| &s.mean_utility),
            }
        })
        .collect();
    ExperimentSummary { per_mechanism }
}
