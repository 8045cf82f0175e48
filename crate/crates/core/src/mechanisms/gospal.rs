//! The GOSPAL mechanism: enumerate all orderings of the nonempty groups,
//! pick the one maximizing perceived utility, and price each winner by the
//! externality it imposes within the ordering-induced allocation family.
//!
//! Pricing keeps the user in the system with its bid driven to zero rather
//! than removing it; because per-ordering allocations do not depend on
//! bids, the zero-bid limit is attained in closed form as
//! `max_j sum_{k != i} q_k x_k(j)`.

use crate::graph::ConflictGraph;
use crate::mechanisms::ordering::{allocate_unchecked, lex_permutations};
use crate::mechanisms::{
    check_dimensions, Allocation, AuctionOutcome, BidVector, GroupPartition, MechanismError,
    MechanismTag,
};

/// Refuse to enumerate orderings of more than this many nonempty groups
/// (7! = 5040 orderings) unless explicitly overridden.
pub const DEFAULT_ORDERING_CAP: usize = 7;

pub fn gospal_run(
    g: &ConflictGraph,
    q: &BidVector,
    partition: &GroupPartition,
) -> Result<AuctionOutcome, MechanismError> {
    gospal_run_with_cap(g, q, partition, DEFAULT_ORDERING_CAP)
}

pub fn gospal_run_with_cap(
    g: &ConflictGraph,
    q: &BidVector,
    partition: &GroupPartition,
    max_groups: usize,
) -> Result<AuctionOutcome, MechanismError> {
    check_dimensions(g, q)?;
    let nonempty = partition.nonempty_indices();
    if nonempty.len() > max_groups {
        return Err(MechanismError::OrderingCapExceeded {
            groups: nonempty.len(),
            cap: max_groups,
        });
    }

    let orderings = lex_permutations(&nonempty);
    let allocations: Vec<Allocation> = orderings
        .iter()
        .map(|ordering| allocate_unchecked(g, partition, ordering))
        .collect();
    let utilities: Vec<f64> = allocations
        .iter()
        .map(|a| a.allocated().map(|i| q.bid(i)).sum())
        .collect();

    // Argmax with ties resolved to the lowest ordering index.
    let best = utilities
        .iter()
        .enumerate()
        .max_by(|(ia, ua), (ib, ub)| ua.partial_cmp(ub).expect("finite utilities").then(ib.cmp(ia)))
        .map(|(idx, _)| idx)
        .expect("at least one ordering");
    let chosen = &allocations[best];
    let best_utility = utilities[best];

    let mut prices = vec![0.0; g.n()];
    for i in chosen.allocated() {
        // lim_{eps -> 0} U*(q_{-i}(eps)) over the fixed allocation family.
        let rivals_best = allocations
            .iter()
            .zip(&utilities)
            .map(|(a, &u)| if a.is_allocated(i) { u - q.bid(i) } else { u })
            .fold(f64::NEG_INFINITY, f64::max);
        // Provably within [0, q_i]; the clamp shields the invariant
        // from last-ulp rounding.
        prices[i - 1] = (rivals_best - (best_utility - q.bid(i))).clamp(0.0, q.bid(i));
    }

    Ok(AuctionOutcome {
        mechanism: MechanismTag::Gospal,
        allocation: chosen.clone(),
        prices,
        perceived_utility: best_utility,
        chosen_ordering: Some(orderings[best].clone()),
    })
}
