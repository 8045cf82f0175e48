//! Strategy-proofness prober: compares each user's utility under a grid of
//! deviation bids against truthful bidding, holding all other bids and the
//! grouping fixed. Violations are data, not errors.

use serde::Serialize;

use crate::graph::ConflictGraph;
use crate::mechanisms::{
    run_mechanism, AuctionOutcome, BidVector, GroupPartition, MechanismError, MechanismTag,
    ValueVector,
};
use crate::metrics::user_utility;

/// A deviation gain above this threshold counts as a violation.
pub const PROBE_TOLERANCE: f64 = 1e-9;

/// Offset for the probes placed just above and below each competitor bid.
const COMPETITOR_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ProbeViolation {
    pub user: usize,
    pub truthful_bid: f64,
    pub deviation_bid: f64,
    pub truthful_utility: f64,
    pub deviated_utility: f64,
    pub gain: f64,
    /// Full truthful bid vector, for replaying the instance.
    pub truthful_bids: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ProbeReport {
    pub probes: usize,
    pub violations: Vec<ProbeViolation>,
}

impl ProbeReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_gain(&self) -> f64 {
        self.violations.iter().map(|v| v.gain).fold(0.0, f64::max)
    }
}

/// Probes an arbitrary mechanism closure. The closure must hold everything
/// except the bid vector fixed (graph, grouping, caps) so that deviations
/// isolate a single user's bid.
pub fn probe_mechanism<F>(
    run: F,
    r: &ValueVector,
    deviation_grid: &[f64],
) -> Result<ProbeReport, MechanismError>
where
    F: Fn(&BidVector) -> Result<AuctionOutcome, MechanismError>,
{
    assert!(
        deviation_grid.iter().all(|&m| m > 0.0),
        "deviation multipliers must be positive"
    );
    let truthful_bids = r.to_bids();
    let truthful = run(&truthful_bids)?;
    let truthful_utilities = user_utility(&truthful, r);

    let mut report = ProbeReport::default();
    for user in 1..=r.len() {
        let mut deviations: Vec<f64> = deviation_grid
            .iter()
            .map(|&m| m * r.value(user))
            .collect();
        for competitor in 1..=r.len() {
            if competitor != user {
                let b = r.value(competitor);
                deviations.push(b - COMPETITOR_DELTA);
                deviations.push(b + COMPETITOR_DELTA);
            }
        }
        deviations.retain(|&d| d > 0.0 && d.is_finite());
        deviations.sort_by(f64::total_cmp);
        deviations.dedup();

        for deviation in deviations {
            let bids = truthful_bids.with_bid(user, deviation)?;
            let outcome = run(&bids)?;
            let deviated_utility = if outcome.allocation.is_allocated(user) {
                r.value(user) - outcome.price(user)
            } else {
                0.0
            };
            report.probes += 1;
            let gain = deviated_utility - truthful_utilities[user - 1];
            if gain > PROBE_TOLERANCE {
                report.violations.push(ProbeViolation {
                    user,
                    truthful_bid: r.value(user),
                    deviation_bid: deviation,
                    truthful_utility: truthful_utilities[user - 1],
                    deviated_utility,
                    gain,
                    truthful_bids: truthful_bids.as_slice().to_vec(),
                });
            }
        }
    }
    Ok(report)
}

/// Probes one of the built-in mechanisms with the grouping held fixed.
pub fn strategy_proofness_probe(
    mechanism: MechanismTag,
    g: &ConflictGraph,
    r: &ValueVector,
    partition: &GroupPartition,
    deviation_grid: &[f64],
) -> Result<ProbeReport, MechanismError> {
    probe_mechanism(
        |bids| run_mechanism(mechanism, g, bids, Some(partition)),
        r,
        deviation_grid,
    )
}
