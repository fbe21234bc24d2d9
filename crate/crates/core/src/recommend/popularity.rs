//! Popularity baseline: score a venue by how many distinct users visited it.

use std::collections::HashMap;

use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;

use super::Recommender;

#[derive(Debug, Clone)]
pub struct Popularity {
    counts: HashMap<VenueId, f64>,
}

impl Popularity {
    pub fn fit(train: &InteractionSet) -> Self {
        let counts = train
            .venues()
            .map(|v| (v, train.users_of(v).len() as f64))
            .collect();
        Self { counts }
    }
}

impl Recommender for Popularity {
    fn name(&self) -> &str {
        "pop"
    }

    /// User-independent; venues absent from training count zero.
    fn score(&self, _user: UserId, venue: VenueId) -> Option<f64> {
        Some(self.counts.get(&venue).copied().unwrap_or(0.0))
    }
}
