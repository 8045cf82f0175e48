//! The SMALL mechanism: each group is valued at `(|G| - 1) * min bid`;
//! every member of the best group except its least bidder wins and pays
//! that least bid. Ties go to the lowest group index, and the excluded
//! least bidder on equal bids is the lowest user id.

use crate::graph::ConflictGraph;
use crate::mechanisms::{
    check_dimensions, Allocation, AuctionOutcome, BidVector, GroupPartition, MechanismError,
    MechanismTag,
};

pub fn small_run(
    g: &ConflictGraph,
    q: &BidVector,
    partition: &GroupPartition,
) -> Result<AuctionOutcome, MechanismError> {
    check_dimensions(g, q)?;

    let mut best: Option<(usize, f64)> = None; // (group index, valuation)
    for u in partition.nonempty_indices() {
        let members = partition.group(u);
        let min_bid = members
            .iter()
            .map(|&i| q.bid(i))
            .fold(f64::INFINITY, f64::min);
        let valuation = (members.len() - 1) as f64 * min_bid;
        let better = match best {
            None => true,
            Some((_, best_val)) => valuation > best_val,
        };
        if better {
            best = Some((u, valuation));
        }
    }

    let mut allocation = Allocation::none(g.n());
    let mut prices = vec![0.0; g.n()];
    let mut utility = 0.0;
    if let Some((u, _)) = best {
        let members = partition.group(u);
        let min_bid = members
            .iter()
            .map(|&i| q.bid(i))
            .fold(f64::INFINITY, f64::min);
        // Lowest id among minimum bidders is the sacrificed user.
        let least = *members
            .iter()
            .find(|&&i| q.bid(i) == min_bid)
            .expect("group is nonempty");
        for &i in members {
            if i != least {
                allocation.set(i);
                prices[i - 1] = min_bid;
                utility += q.bid(i);
            }
        }
    }

    Ok(AuctionOutcome {
        mechanism: MechanismTag::Small,
        allocation,
        prices,
        perceived_utility: utility,
        chosen_ordering: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::conflict_free_grouping;

    #[test]
    fn example_allocates_only_user_six() {
        let g = ConflictGraph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let q = BidVector::new(vec![5.0, 7.0, 8.0, 9.0, 6.0, 9.0]).unwrap();
        let p = GroupPartition::new(&g, vec![vec![1, 5], vec![2, 4], vec![3, 6]]).unwrap();
        let out = small_run(&g, &q, &p).unwrap();
        assert_eq!(out.allocation.as_binary(), vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(out.prices, vec![0.0, 0.0, 0.0, 0.0, 0.0, 8.0]);
        assert_eq!(out.perceived_utility, 9.0);
    }

    #[test]
    fn all_singletons_allocate_nothing() {
        let g = ConflictGraph::complete(3);
        let q = BidVector::new(vec![4.0, 2.0, 9.0]).unwrap();
        let p = conflict_free_grouping(&g, 5);
        let out = small_run(&g, &q, &p).unwrap();
        assert_eq!(out.allocation.count(), 0);
        assert_eq!(out.prices, vec![0.0; 3]);
    }

    #[test]
    fn pair_group_charges_min_bid() {
        let g = ConflictGraph::edgeless(2);
        let q = BidVector::new(vec![3.0, 5.0]).unwrap();
        let p = GroupPartition::new(&g, vec![vec![1, 2]]).unwrap();
        let out = small_run(&g, &q, &p).unwrap();
        assert_eq!(out.allocation.as_binary(), vec![0, 1]);
        assert_eq!(out.prices, vec![0.0, 3.0]);
    }

    #[test]
    fn tie_breaks_are_deterministic() {
        // Two groups with equal valuation: lowest group index wins; equal
        // minimum bids exclude the lowest user id.
        let g = ConflictGraph::from_edges(4, &[(1, 3), (2, 4)]).unwrap();
        let q = BidVector::new(vec![2.0, 2.0, 2.0, 2.0]).unwrap();
        let p = GroupPartition::new(&g, vec![vec![1, 2], vec![3, 4]]).unwrap();
        let out = small_run(&g, &q, &p).unwrap();
        assert_eq!(out.allocation.as_binary(), vec![0, 1, 0, 0]);
        assert_eq!(out.prices[1], 2.0);
    }
}
