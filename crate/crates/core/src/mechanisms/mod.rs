//! Auction mechanisms over a conflict graph.
//!
//! Four mechanisms share the same interface from `(graph, bids)` to an
//! [`AuctionOutcome`] of a feasible allocation plus per-user prices:
//!
//! * [`gospal_run`] — group-ordering mechanism with retained-user pricing,
//! * [`vcg_run`] — exact VCG backed by a branch-and-bound solver,
//! * [`small_run`] — group-valuation mechanism sacrificing each group's
//!   least bidder,
//! * [`greedy_run`] — highest-bid-first allocation with rerun pricing.
//!
//! GOSPAL and SMALL additionally take a conflict-free [`GroupPartition`];
//! [`run_mechanism`] dispatches on a [`MechanismTag`].

mod gospal;
mod greedy;
mod grouping;
mod mwis;
mod ordering;
mod small;
mod vcg;

pub use gospal::{gospal_run, gospal_run_with_cap, DEFAULT_ORDERING_CAP};
pub use greedy::greedy_run;
pub use grouping::{conflict_free_grouping, GroupPartition};
pub use mwis::{mwis_exact, mwis_exact_with_cap, DEFAULT_MWIS_CAP};
pub use ordering::{allocate_for_ordering, lex_permutations};
pub use small::small_run;
pub use vcg::vcg_run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ConflictGraph;

#[derive(Debug, Error)]
pub enum MechanismError {
    #[error("bid for user {user} is {bid}; bids must be positive and finite")]
    NonpositiveBid { user: usize, bid: f64 },
    #[error("valuation for user {user} is {value}; valuations must be positive and finite")]
    NonpositiveValue { user: usize, value: f64 },
    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("ordering is not a permutation of the partition's nonempty groups: {0}")]
    InvalidOrdering(String),
    #[error("{groups} nonempty groups exceed the ordering cap of {cap} ({groups}! orderings)")]
    OrderingCapExceeded { groups: usize, cap: usize },
    #[error("{n} users exceed the exact-solver cap of {cap}")]
    SolverCapExceeded { n: usize, cap: usize },
    #[error("mechanism {0} requires a group partition")]
    MissingPartition(MechanismTag),
    #[error("unknown mechanism tag {0:?}")]
    UnknownTag(String),
}

/// Mechanism selector; string form is `gospal | vcg | small | greedy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismTag {
    Gospal,
    Vcg,
    Small,
    Greedy,
}

impl MechanismTag {
    pub const ALL: [MechanismTag; 4] = [
        MechanismTag::Gospal,
        MechanismTag::Vcg,
        MechanismTag::Small,
        MechanismTag::Greedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MechanismTag::Gospal => "gospal",
            MechanismTag::Vcg => "vcg",
            MechanismTag::Small => "small",
            MechanismTag::Greedy => "greedy",
        }
    }

    /// Whether the mechanism consumes a group partition.
    pub fn needs_partition(self) -> bool {
        matches!(self, MechanismTag::Gospal | MechanismTag::Small)
    }
}

impl fmt::Display for MechanismTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MechanismTag {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gospal" => Ok(MechanismTag::Gospal),
            "vcg" => Ok(MechanismTag::Vcg),
            "small" => Ok(MechanismTag::Small),
            "greedy" => Ok(MechanismTag::Greedy),
            other => Err(MechanismError::UnknownTag(other.to_string())),
        }
    }
}

/// Per-user positive bids, indexed by 1-based user id.
#[derive(Debug, Clone, PartialEq)]
pub struct BidVector(Vec<f64>);

impl BidVector {
    pub fn new(q: Vec<f64>) -> Result<Self, MechanismError> {
        for (idx, &bid) in q.iter().enumerate() {
            if !(bid.is_finite() && bid > 0.0) {
                return Err(MechanismError::NonpositiveBid { user: idx + 1, bid });
            }
        }
        Ok(Self(q))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bid of user `i` (1-based).
    pub fn bid(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Copy with user `i`'s coordinate substituted (the perturbed vector used
    /// in pricing and deviation probes).
    pub fn with_bid(&self, i: usize, bid: f64) -> Result<Self, MechanismError> {
        let mut q = self.0.clone();
        q[i - 1] = bid;
        Self::new(q)
    }
}

/// Per-user positive private valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(r: Vec<f64>) -> Result<Self, MechanismError> {
        for (idx, &value) in r.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(MechanismError::NonpositiveValue {
                    user: idx + 1,
                    value,
                });
            }
        }
        Ok(Self(r))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Valuation of user `i` (1-based).
    pub fn value(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Truthful bids: `q = r`.
    pub fn to_bids(&self) -> BidVector {
        BidVector(self.0.clone())
    }
}

/// Binary allocation indicator over users `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    x: Vec<bool>,
}

impl Allocation {
    pub fn none(n: usize) -> Self {
        Self { x: vec![false; n] }
    }

    pub fn from_allocated(n: usize, allocated: &[usize]) -> Self {
        let mut a = Self::none(n);
        for &i in allocated {
            a.x[i - 1] = true;
        }
        a
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_allocated(&self, i: usize) -> bool {
        self.x[i - 1]
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.x[i - 1] = true;
    }

    /// Allocated users in increasing id order.
    pub fn allocated(&self) -> impl Iterator<Item = usize> + '_ {
        self.x
            .iter()
            .enumerate()
            .filter_map(|(idx, &on)| on.then_some(idx + 1))
    }

    pub fn count(&self) -> usize {
        self.x.iter().filter(|&&on| on).count()
    }

    pub fn as_binary(&self) -> Vec<u8> {
        self.x.iter().map(|&on| on as u8).collect()
    }

    /// No allocated user conflicts with another allocated user: at most one
    /// holder in every closed neighborhood `{i} u S_i`.
    pub fn is_feasible(&self, g: &ConflictGraph) -> bool {
        g.users()
            .filter(|&i| self.x[i - 1])
            .all(|i| self.allocated_conflicts(g, i) == 0)
    }

    /// Feasible and saturated: every closed neighborhood holds the resource
    /// exactly once, so no further user could be added.
    pub fn is_maximal(&self, g: &ConflictGraph) -> bool {
        self.is_feasible(g)
            && g.users()
                .filter(|&i| !self.x[i - 1])
                .all(|i| self.allocated_conflicts(g, i) >= 1)
    }

    fn allocated_conflicts(&self, g: &ConflictGraph, i: usize) -> usize {
        g.constraint_set(i)
            .iter()
            .filter(|&&j| self.x[j - 1])
            .count()
    }
}

/// Result of one auction: allocation, prices and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub mechanism: MechanismTag,
    pub allocation: Allocation,
    /// Per-user prices; zero for unallocated users.
    pub prices: Vec<f64>,
    /// Bid-weighted welfare of the chosen allocation.
    pub perceived_utility: f64,
    /// Group-index sequence of the winning ordering (GOSPAL only).
    pub chosen_ordering: Option<Vec<usize>>,
}

impl AuctionOutcome {
    pub fn price(&self, i: usize) -> f64 {
        self.prices[i - 1]
    }

    /// Wire form: `{"mechanism", "allocation", "prices",
    /// "perceived_utility", "chosen_ordering"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mechanism": self.mechanism.as_str(),
            "allocation": self.allocation.as_binary(),
            "prices": self.prices,
            "perceived_utility": self.perceived_utility,
            "chosen_ordering": self.chosen_ordering,
        })
    }
}

/// Bid-weighted welfare of an allocation, summed in user-id order.
pub fn perceived_utility(a: &Allocation, q: &BidVector) -> f64 {
    assert_eq!(a.len(), q.len(), "allocation and bids must have equal length");
    a.allocated().map(|i| q.bid(i)).sum()
}

fn check_dimensions(g: &ConflictGraph, q: &BidVector) -> Result<(), MechanismError> {
    if g.n() != q.len() {
        return Err(MechanismError::DimensionMismatch {
            expected: g.n(),
            actual: q.len(),
        });
    }
    Ok(())
}

/// Runs the selected mechanism. `partition` is required for GOSPAL and
/// SMALL and ignored by VCG and greedy.
pub fn run_mechanism(
    tag: MechanismTag,
    g: &ConflictGraph,
    q: &BidVector,
    partition: Option<&GroupPartition>,
) -> Result<AuctionOutcome, MechanismError> {
    match tag {
        MechanismTag::Gospal => {
            let p = partition.ok_or(MechanismError::MissingPartition(tag))?;
            gospal_run(g, q, p)
        }
        MechanismTag::Vcg => vcg_run(g, q),
        MechanismTag::Small => {
            let p = partition.ok_or(MechanismError::MissingPartition(tag))?;
            small_run(g, q, p)
        }
        MechanismTag::Greedy => greedy_run(g, q),
    }
}
