//! Greedy mechanism: repeatedly select the highest remaining bidder that
//! conflicts with no winner so far (ties to the lowest user id). A winner's
//! price is the highest bid among the winners of a greedy rerun with that
//! user deleted, restricted to its constraint set; zero when the rerun
//! selects no conflicting user.

use crate::graph::ConflictGraph;
use crate::mechanisms::{
    check_dimensions, Allocation, AuctionOutcome, BidVector, MechanismError, MechanismTag,
};

/// Winner ids in selection order; `skip` removes a user from the instance.
fn greedy_winners(g: &ConflictGraph, q: &BidVector, skip: Option<usize>) -> Vec<usize> {
    let n = g.n();
    let mut excluded = vec![false; n];
    if let Some(s) = skip {
        excluded[s - 1] = true;
    }
    let mut winners = Vec::new();
    loop {
        let mut pick: Option<usize> = None;
        for i in 1..=n {
            if excluded[i - 1] {
                continue;
            }
            match pick {
                Some(best) if q.bid(i) <= q.bid(best) => {}
                _ => pick = Some(i),
            }
        }
        let Some(i) = pick else { break };
        winners.push(i);
        excluded[i - 1] = true;
        for &j in g.constraint_set(i) {
            excluded[j - 1] = true;
        }
    }
    winners
}

pub fn greedy_run(g: &ConflictGraph, q: &BidVector) -> Result<AuctionOutcome, MechanismError> {
    check_dimensions(g, q)?;
    let winners = greedy_winners(g, q, None);
    let allocation = Allocation::from_allocated(g.n(), &winners);

    let mut prices = vec![0.0; g.n()];
    for &i in &winners {
        let rerun = greedy_winners(g, q, Some(i));
        let conflicted_max = rerun
            .iter()
            .filter(|&&j| g.conflicts(i, j))
            .map(|&j| q.bid(j))
            .fold(0.0, f64::max);
        prices[i - 1] = conflicted_max;
    }

    let utility = allocation.allocated().map(|i| q.bid(i)).sum();
    Ok(AuctionOutcome {
        mechanism: MechanismTag::Greedy,
        allocation,
        prices,
        perceived_utility: utility,
        chosen_ordering: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_winners_and_prices() {
        let g = ConflictGraph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let q = BidVector::new(vec![5.0, 7.0, 8.0, 9.0, 6.0, 9.0]).unwrap();
        let out = greedy_run(&g, &q).unwrap();
        assert_eq!(out.allocation.allocated().collect::<Vec<_>>(), vec![2, 4, 6]);
        assert_eq!(out.prices, vec![0.0, 5.0, 0.0, 8.0, 0.0, 6.0]);
        assert_eq!(out.perceived_utility, 25.0);
        assert!(out.allocation.is_maximal(&g));
    }

    #[test]
    fn edgeless_graph_wins_free() {
        let g = ConflictGraph::edgeless(3);
        let q = BidVector::new(vec![2.0, 8.0, 5.0]).unwrap();
        let out = greedy_run(&g, &q).unwrap();
        assert_eq!(out.allocation.count(), 3);
        assert_eq!(out.prices, vec![0.0; 3]);
    }

    #[test]
    fn single_edge_matches_second_price() {
        let g = ConflictGraph::from_edges(2, &[(1, 2)]).unwrap();
        let q = BidVector::new(vec![10.0, 4.0]).unwrap();
        let out = greedy_run(&g, &q).unwrap();
        assert!(out.allocation.is_allocated(1));
        assert_eq!(out.prices, vec![4.0, 0.0]);
    }

    #[test]
    fn bid_ties_pick_lowest_id() {
        let g = ConflictGraph::complete(2);
        let q = BidVector::new(vec![7.0, 7.0]).unwrap();
        let out = greedy_run(&g, &q).unwrap();
        assert!(out.allocation.is_allocated(1));
        assert!(!out.allocation.is_allocated(2));
        assert_eq!(out.prices, vec![7.0, 0.0]);
    }
}
