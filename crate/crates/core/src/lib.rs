//! Strategy-proof auction mechanisms for single-resource allocation over a
//! conflict graph.
//!
//! A centralized controller auctions one resource per allocation frame among
//! `n` users; allocating to user `i` forbids allocating to anyone in its
//! constraint set `S_i`. This crate provides:
//!
//! * [`graph`] — conflict-graph types, validation, configuration-model
//!   generation and JSON persistence;
//! * [`mechanisms`] — GOSPAL (conflict-free grouping, per-ordering
//!   allocation, retained-user pricing), exact VCG on top of a
//!   branch-and-bound maximum-weight-independent-set solver, and the SMALL
//!   and greedy baselines, all behind one interface;
//! * [`metrics`] — social welfare, utilization, per-user utility and Jain's
//!   fairness index;
//! * [`simulate`] — a seeded repeated-auction harness with CSV/JSON output
//!   and a strategy-proofness prober.

pub mod graph;
pub mod mechanisms;
pub mod metrics;
pub mod simulate;

pub use graph::{ConflictGraph, DegreeDistribution, GraphError};
pub use mechanisms::{
    Allocation, AuctionOutcome, BidVector, GroupPartition, MechanismError, MechanismTag,
    ValueVector,
};
pub use metrics::MetricsReport;
pub use simulate::{BidModel, ExperimentConfig, SimError};
