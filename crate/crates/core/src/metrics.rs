//! Welfare, utilization and fairness computations.

use serde::Serialize;
use thiserror::Error;

use crate::mechanisms::{Allocation, AuctionOutcome, ValueVector};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("fairness index is undefined for an all-zero allocation-fraction vector")]
    AllZeroFractions,
}

/// Social utility: sum of TRUE valuations over allocated users.
pub fn social_welfare(a: &Allocation, r: &ValueVector) -> f64 {
    assert_eq!(a.len(), r.len(), "allocation and valuations must match");
    a.allocated().map(|i| r.value(i)).sum()
}

/// Number of users holding the resource.
pub fn utilization(a: &Allocation) -> usize {
    a.count()
}

/// Per-user utility `(r_i - p_i) * x_i`; zero for unallocated users.
pub fn user_utility(outcome: &AuctionOutcome, r: &ValueVector) -> Vec<f64> {
    assert_eq!(outcome.allocation.len(), r.len());
    (1..=r.len())
        .map(|i| {
            if outcome.allocation.is_allocated(i) {
                r.value(i) - outcome.price(i)
            } else {
                0.0
            }
        })
        .collect()
}

/// Jain's fairness index `(sum a_i)^2 / (n * sum a_i^2)`, in `[1/n, 1]`,
/// equal to 1 exactly when all fractions are equal.
pub fn jain_index(alpha: &[f64]) -> Result<f64, MetricsError> {
    debug_assert!(alpha.iter().all(|&a| a >= 0.0));
    let sum: f64 = alpha.iter().sum();
    let sum_sq: f64 = alpha.iter().map(|&a| a * a).sum();
    if sum_sq == 0.0 {
        return Err(MetricsError::AllZeroFractions);
    }
    Ok(sum * sum / (alpha.len() as f64 * sum_sq))
}

/// Per-frame record of one mechanism's auction, with running fairness state.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub social_welfare: f64,
    pub utilization: usize,
    pub per_user_utility: Vec<f64>,
    /// Fraction of frames so far (this one included) in which each user was
    /// allocated.
    pub allocation_fractions: Vec<f64>,
    /// Jain index of `allocation_fractions`; 0.0 while no user has ever been
    /// allocated.
    pub jain_index: f64,
}

impl MetricsReport {
    pub fn for_frame(
        outcome: &AuctionOutcome,
        r: &ValueVector,
        allocation_counts: &[usize],
        frames_so_far: usize,
    ) -> Self {
        let fractions: Vec<f64> = allocation_counts
            .iter()
            .map(|&c| c as f64 / frames_so_far as f64)
            .collect();
        let jain = jain_index(&fractions).unwrap_or(0.0);
        Self {
            social_welfare: social_welfare(&outcome.allocation, r),
            utilization: utilization(&outcome.allocation),
            per_user_utility: user_utility(outcome, r),
            allocation_fractions: fractions,
            jain_index: jain,
        }
    }
}
