//! Bid generation models for repeated auctions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mechanisms::BidVector;

/// How bids evolve across allocation frames.
///
/// `IidUniform` draws every bid independently each frame. In
/// `PersistentOffset`, each user keeps a base level drawn once per run and
/// adds fresh iid noise every frame, so relative bid strength persists
/// across time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BidModel {
    IidUniform {
        lo: f64,
        hi: f64,
    },
    PersistentOffset {
        mu_lo: f64,
        mu_hi: f64,
        noise_lo: f64,
        noise_hi: f64,
    },
}

impl BidModel {
    /// All problems with the bounds, not just the first.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        match *self {
            BidModel::IidUniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    errs.push("bid bounds must be finite".to_string());
                }
                if lo >= hi {
                    errs.push(format!("bid interval requires lo < hi, got [{lo}, {hi}]"));
                }
                if lo <= 0.0 {
                    errs.push(format!(
                        "bid interval must guarantee positive bids, got lo = {lo}"
                    ));
                }
            }
            BidModel::PersistentOffset {
                mu_lo,
                mu_hi,
                noise_lo,
                noise_hi,
            } => {
                if ![mu_lo, mu_hi, noise_lo, noise_hi].iter().all(|b| b.is_finite()) {
                    errs.push("bid bounds must be finite".to_string());
                }
                if mu_lo >= mu_hi {
                    errs.push(format!(
                        "base interval requires mu_lo < mu_hi, got [{mu_lo}, {mu_hi}]"
                    ));
                }
                if noise_lo >= noise_hi {
                    errs.push(format!(
                        "noise interval requires noise_lo < noise_hi, got [{noise_lo}, {noise_hi}]"
                    ));
                }
                if mu_lo + noise_lo <= 0.0 {
                    errs.push(format!(
                        "bounds must guarantee positive bids: mu_lo + noise_lo = {}",
                        mu_lo + noise_lo
                    ));
                }
            }
        }
        errs
    }
}

/// Seeded per-run bid source; frames must be drawn in order.
#[derive(Debug, Clone)]
pub struct BidSampler {
    model: BidModel,
    n: usize,
    base: Vec<f64>,
    rng: ChaCha8Rng,
    next_frame: usize,
}

impl BidSampler {
    pub fn new(model: &BidModel, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = match *model {
            BidModel::IidUniform { .. } => Vec::new(),
            BidModel::PersistentOffset { mu_lo, mu_hi, .. } => {
                (0..n).map(|_| rng.gen_range(mu_lo..=mu_hi)).collect()
            }
        };
        Self {
            model: model.clone(),
            n,
            base,
            rng,
            next_frame: 0,
        }
    }

    /// Per-user base levels (empty for the iid model).
    pub fn base_levels(&self) -> &[f64] {
        &self.base
    }

    /// Bids for the given frame index.
    pub fn draw_bids(&mut self, frame: usize) -> BidVector {
        debug_assert_eq!(frame, self.next_frame, "frames must be drawn in order");
        self.next_frame = frame + 1;
        let raw: Vec<f64> = match self.model {
            BidModel::IidUniform { lo, hi } => {
                (0..self.n).map(|_| self.rng.gen_range(lo..=hi)).collect()
            }
            BidModel::PersistentOffset {
                noise_lo, noise_hi, ..
            } => self
                .base
                .iter()
                .map(|&mu| mu + self.rng.gen_range(noise_lo..=noise_hi))
                .collect(),
        };
        BidVector::new(raw).expect("validated bounds guarantee positive bids")
    }
}
