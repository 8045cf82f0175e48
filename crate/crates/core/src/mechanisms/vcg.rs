//! Exact VCG: the allocation maximizes total bid value over all feasible
//! allocations, and each winner pays the externality it imposes, computed
//! with the user removed from the instance (constraint sets of the others
//! unchanged).

use crate::graph::ConflictGraph;
use crate::mechanisms::{
    check_dimensions, mwis, Allocation, AuctionOutcome, BidVector, MechanismError, MechanismTag,
    DEFAULT_MWIS_CAP,
};

pub fn vcg_run(g: &ConflictGraph, q: &BidVector) -> Result<AuctionOutcome, MechanismError> {
    vcg_run_with_cap(g, q, DEFAULT_MWIS_CAP)
}

pub fn vcg_run_with_cap(
    g: &ConflictGraph,
    q: &BidVector,
    cap: usize,
) -> Result<AuctionOutcome, MechanismError> {
    check_dimensions(g, q)?;
    let n = g.n();
    if n > cap || n > 63 {
        return Err(MechanismError::SolverCapExceeded { n, cap: cap.min(63) });
    }

    let full_mask = if n == 63 { !0u64 } else { (1u64 << n) - 1 };
    let (winners, optimum) = mwis::solve(g, q.as_slice(), full_mask);
    let allocation = Allocation::from_allocated(n, &winners);

    let mut prices = vec![0.0; n];
    for &i in &winners {
        let (_, without_i) = mwis::solve(g, q.as_slice(), full_mask & !(1 << (i - 1)));
        prices[i - 1] = (without_i - (optimum - q.bid(i))).clamp(0.0, q.bid(i));
    }

    Ok(AuctionOutcome {
        mechanism: MechanismTag::Vcg,
        allocation,
        prices,
        perceived_utility: optimum,
        chosen_ordering: None,
    })
}
