//! Resource allocation for a given group ordering.
//!
//! Given an ordering of the partition's nonempty groups, the first group is
//! allocated in full and each later group contributes exactly its members
//! that do not conflict with previously allocated users. The result is
//! feasible and maximal, and depends only on the graph and the ordering —
//! never on bids.

use crate::graph::ConflictGraph;
use crate::mechanisms::{Allocation, GroupPartition, MechanismError};

/// All permutations of `items` in lexicographic order.
///
/// Callers pass sorted group indices, so the first permutation is the
/// identity ordering and index positions are reproducible.
pub fn lex_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(items.len());
    let mut used = vec![false; items.len()];
    fn recurse(
        items: &[usize],
        used: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == items.len() {
            out.push(current.clone());
            return;
        }
        for idx in 0..items.len() {
            if !used[idx] {
                used[idx] = true;
                current.push(items[idx]);
                recurse(items, used, current, out);
                current.pop();
                used[idx] = false;
            }
        }
    }
    recurse(items, &mut used, &mut current, &mut out);
    out
}

/// Runs the per-ordering allocation: `ordering` lists 1-based group indices
/// and must be a permutation of the partition's nonempty groups.
pub fn allocate_for_ordering(
    g: &ConflictGraph,
    partition: &GroupPartition,
    ordering: &[usize],
) -> Result<Allocation, MechanismError> {
    let mut expected = partition.nonempty_indices();
    let mut given = ordering.to_vec();
    given.sort_unstable();
    expected.sort_unstable();
    if given != expected {
        return Err(MechanismError::InvalidOrdering(format!(
            "got {ordering:?}, nonempty groups are {expected:?}"
        )));
    }
    Ok(allocate_unchecked(g, partition, ordering))
}

/// Allocation pass without the permutation check; callers enumerate
/// orderings straight from `nonempty_indices`.
pub(crate) fn allocate_unchecked(
    g: &ConflictGraph,
    partition: &GroupPartition,
    ordering: &[usize],
) -> Allocation {
    let mut allocation = Allocation::none(g.n());
    let mut blocked = vec![false; g.n()];
    for &u in ordering {
        for &i in partition.group(u) {
            if !blocked[i - 1] {
                allocation.set(i);
            }
        }
        // Members of one group never conflict with each other, so blocking
        // can be applied after the whole group is processed.
        for &i in partition.group(u) {
            if allocation.is_allocated(i) {
                for &j in g.constraint_set(i) {
                    blocked[j - 1] = true;
                }
            }
        }
    }
    allocation
}
