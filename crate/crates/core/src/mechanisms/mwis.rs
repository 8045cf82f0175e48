//! Exact maximum-weight independent set via branch and bound.
//!
//! Depth-first over users in id order, include-branch first, pruning with
//! the remaining-weight upper bound. Ties on total weight keep the
//! lexicographically smallest set, so results are deterministic. Finding
//! the optimum is NP-hard in general, hence the instance-size cap.

use crate::graph::ConflictGraph;
use crate::mechanisms::MechanismError;

/// Default instance-size cap for the exact solver.
pub const DEFAULT_MWIS_CAP: usize = 30;

/// Maximum-weight independent set with the default cap. Returns the chosen
/// users (sorted) and their total weight.
pub fn mwis_exact(
    g: &ConflictGraph,
    weights: &[f64],
) -> Result<(Vec<usize>, f64), MechanismError> {
    mwis_exact_with_cap(g, weights, DEFAULT_MWIS_CAP)
}

pub fn mwis_exact_with_cap(
    g: &ConflictGraph,
    weights: &[f64],
    cap: usize,
) -> Result<(Vec<usize>, f64), MechanismError> {
    let n = g.n();
    if n > cap || n > 63 {
        return Err(MechanismError::SolverCapExceeded { n, cap: cap.min(63) });
    }
    if weights.len() != n {
        return Err(MechanismError::DimensionMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    Ok(solve(g, weights, !0u64))
}

/// Solves over the users whose bit (id - 1) is set in `mask`; users outside
/// the mask are treated as removed, leaving other constraint sets unchanged.
pub(crate) fn solve(g: &ConflictGraph, weights: &[f64], mask: u64) -> (Vec<usize>, f64) {
    let n = g.n();
    let neighbors: Vec<u64> = (1..=n)
        .map(|i| {
            g.constraint_set(i)
                .iter()
                .fold(0u64, |acc, &j| acc | (1 << (j - 1)))
        })
        .collect();
    // Suffix sums of eligible weight: bound for "everything from index idx on".
    let mut suffix = vec![0.0; n + 1];
    for idx in (0..n).rev() {
        let w = if mask & (1 << idx) != 0 { weights[idx] } else { 0.0 };
        suffix[idx] = suffix[idx + 1] + w;
    }

    let mut best = Best {
        set: 0,
        weight: f64::NEG_INFINITY,
    };
    branch(0, 0u64, 0.0, 0u64, n, weights, &neighbors, &suffix, mask, &mut best);

    let mut members: Vec<usize> = (0..n).filter(|idx| best.set & (1 << idx) != 0).map(|idx| idx + 1).collect();
    members.sort_unstable();
    // Recompute in id order so reported weights are reproducible.
    let weight = members.iter().map(|&i| weights[i - 1]).sum();
    (members, weight)
}

struct Best {
    set: u64,
    weight: f64,
}

#[allow(clippy::too_many_arguments)]
fn branch(
    idx: usize,
    chosen: u64,
    weight: f64,
    excluded: u64,
    n: usize,
    weights: &[f64],
    neighbors: &[u64],
    suffix: &[f64],
    mask: u64,
    best: &mut Best,
) {
    if idx == n {
        if weight > best.weight || (weight == best.weight && lex_smaller(chosen, best.set)) {
            best.set = chosen;
            best.weight = weight;
        }
        return;
    }
    // Strict pruning only: an equal bound may still hide a lex-smaller tie.
    if weight + suffix[idx] < best.weight {
        return;
    }
    let bit = 1u64 << idx;
    let available = mask & bit != 0 && excluded & bit == 0;
    if available {
        branch(
            idx + 1,
            chosen | bit,
            weight + weights[idx],
            excluded | neighbors[idx],
            n,
            weights,
            neighbors,
            suffix,
            mask,
            best,
        );
    }
    branch(idx + 1, chosen, weight, excluded, n, weights, neighbors, suffix, mask, best);
}

/// Lexicographic order on sets viewed as sorted id lists; a proper prefix
/// precedes its extensions.
fn lex_smaller(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let diff = a ^ b;
    let first = diff.trailing_zeros();
    // If the first differing id belongs to `a`, then `a` has the smaller
    // element there (or `b` ended, which also makes `a`... larger: a longer
    // list continuing past a common prefix is lex-greater). Membership of the
    // first differing bit decides both cases.
    let a_has = a & (1 << first) != 0;
    if a_has {
        // b lacks this id: either b has a later id instead (a smaller) or b
        // is a prefix of a (a greater).
        b >> first != 0
    } else {
        a >> first == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_graph_weights() {
        let g = ConflictGraph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let (set, weight) = mwis_exact(&g, &[5.0, 7.0, 8.0, 9.0, 6.0, 9.0]).unwrap();
        assert_eq!(set, vec![2, 4, 6]);
        assert_eq!(weight, 25.0);
    }

    #[test]
    fn complete_graph_picks_heaviest_singleton() {
        let g = ConflictGraph::complete(3);
        let (set, weight) = mwis_exact(&g, &[3.0, 9.0, 1.0]).unwrap();
        assert_eq!(set, vec![2]);
        assert_eq!(weight, 9.0);
    }

    #[test]
    fn edgeless_graph_takes_everyone() {
        let g = ConflictGraph::edgeless(4);
        let (set, weight) = mwis_exact(&g, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(set, vec![1, 2, 3, 4]);
        assert_eq!(weight, 10.0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = ConflictGraph::edgeless(31);
        let err = mwis_exact(&g, &vec![1.0; 31]).unwrap_err();
        assert!(matches!(err, MechanismError::SolverCapExceeded { n: 31, cap: 30 }));
        assert!(mwis_exact_with_cap(&g, &vec![1.0; 31], 40).is_ok());
    }

    #[test]
    fn tie_break_prefers_lex_smallest() {
        // Path 1-2-3 with equal weights: {1,3} and {2}... {1,3} wins on
        // weight. Make {1} and {3} tie instead via a triangle minus nothing.
        let g = ConflictGraph::complete(3);
        let (set, _) = mwis_exact(&g, &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(set, vec![1]);
        // Zero-weight users can still join to make the set lex-smaller.
        let g2 = ConflictGraph::edgeless(2);
        let (set2, w2) = mwis_exact(&g2, &[0.0, 1.0]).unwrap();
        assert_eq!(set2, vec![1, 2]);
        assert_eq!(w2, 1.0);
    }

    #[test]
    fn lex_smaller_on_bitmasks() {
        let set = |ids: &[usize]| ids.iter().fold(0u64, |m, &i| m | (1 << (i - 1)));
        assert!(lex_smaller(set(&[1, 2]), set(&[2])));
        assert!(lex_smaller(set(&[2]), set(&[2, 5])));
        assert!(lex_smaller(set(&[1, 4]), set(&[2, 3])));
        assert!(!lex_smaller(set(&[2, 5]), set(&[2])));
        assert!(lex_smaller(set(&[]), set(&[1])));
    }
}
