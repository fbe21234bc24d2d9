//! Random baseline: a deterministic pseudo-random score per (user, venue).

use crate::ids::{UserId, VenueId};
use crate::rng::hash_score;

use super::Recommender;

#[derive(Debug, Clone)]
pub struct RandomModel {
    seed: u64,
}

impl RandomModel {
    pub fn fit(seed: u64) -> Self {
        Self { seed }
    }
}

impl Recommender for RandomModel {
    fn name(&self) -> &str {
        "rnd"
    }

    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        Some(hash_score(self.seed, user.0 as u64, venue.0 as u64))
    }
}
