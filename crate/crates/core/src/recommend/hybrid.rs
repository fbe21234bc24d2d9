//! Hybrid of popularity, user-based k-NN, and the geographic baseline:
//! each component's scores are normalized per user by the component's
//! maximum over the candidate set, then summed.
//!
//! Normalization per component, per user, over the candidates:
//! - max > 0: score / max (the usual case).
//! - max < 0 (the distance component): max / score, which maps the best
//!   candidate to 1 and farther ones into (0, 1) without flipping signs.
//! - max = 0: the component contributes 0.
//!
//! Components that cannot score a user contribute 0, so the hybrid covers
//! every user the popularity component covers.

use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::similarity::SimilarityKind;
use crate::types::VenueTable;

use super::{AvgDis, KnnParams, Popularity, Recommender, UserKnn};

/// Neighborhood size of the embedded user-based component.
pub const PGN_NEIGHBORS: usize = 100;

pub struct Pgn {
    popularity: Popularity,
    user_knn: UserKnn,
    avgdis: AvgDis,
}

impl Pgn {
    pub fn fit(train: &InteractionSet, venues: &VenueTable) -> Self {
        let params =
            KnnParams::new(SimilarityKind::SetJaccard, PGN_NEIGHBORS).expect("constants are valid");
        Self {
            popularity: Popularity::fit(train),
            user_knn: UserKnn::fit(train, params),
            avgdis: AvgDis::fit(train, venues),
        }
    }

    fn components(&self) -> [&dyn Recommender; 3] {
        [&self.popularity, &self.user_knn, &self.avgdis]
    }
}

fn normalize(scores: &[Option<f64>]) -> Vec<f64> {
    let max = scores
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .map(|s| match s {
            None => 0.0,
            Some(s) => {
                if max > 0.0 {
                    s / max
                } else if max < 0.0 {
                    max / s
                } else {
                    0.0
                }
            }
        })
        .collect()
}

impl Recommender for Pgn {
    fn name(&self) -> &str {
        "pgn"
    }

    /// Degenerate single-candidate form of `score_candidates`.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        self.score_candidates(user, &[venue]).pop().flatten()
    }

    fn score_candidates(&self, user: UserId, candidates: &[VenueId]) -> Vec<Option<f64>> {
        if candidates.is_empty() {
            return Vec::new();
        }
        let mut total = vec![0.0; candidates.len()];
        for component in self.components() {
            let raw = component.score_candidates(user, candidates);
            if raw.iter().all(|s| s.is_none()) {
                continue;
            }
            for (t, n) in total.iter_mut().zip(normalize(&raw)) {
                *t += n;
            }
        }
        total.into_iter().map(Some).collect()
    }
}
