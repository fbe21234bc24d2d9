//! The recommender family under one contract: fit on a training
//! interaction set, then score candidate venues for a user.
//!
//! A score of `None` means the model cannot score that (user, venue) pair;
//! abstentions feed the coverage accounting in the evaluation layer.

mod als;
mod avgdis;
mod hybrid;
mod knn;
mod popularity;
mod random;

pub use als::{fit_hkv, resolve_user_side, FactorModel, FactorModelParams};
pub use avgdis::AvgDis;
pub use hybrid::Pgn;
pub use knn::{ItemKnn, KnnParams, UserKnn};
pub use popularity::Popularity;
pub use random::RandomModel;

use crate::ids::{UserId, VenueId};

/// Uniform scoring contract. Scores are deterministic after fit and always
/// finite when present.
pub trait Recommender: Send + Sync {
    /// Short identifier used in reports ("pop", "ub", ...).
    fn name(&self) -> &str;

    /// Score one candidate venue for a user; `None` = cannot score.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64>;

    /// Score a whole candidate set for one user. Models that normalize
    /// per user across candidates override this.
    fn score_candidates(&self, user: UserId, candidates: &[VenueId]) -> Vec<Option<f64>> {
        candidates.iter().map(|&v| self.score(user, v)).collect()
    }
}

impl<T: Recommender + ?Sized> Recommender for &T {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        (**self).score(user, venue)
    }

    fn score_candidates(&self, user: UserId, candidates: &[VenueId]) -> Vec<Option<f64>> {
        (**self).score_candidates(user, candidates)
    }
}

impl Recommender for Box<dyn Recommender> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        (**self).score(user, venue)
    }

    fn score_candidates(&self, user: UserId, candidates: &[VenueId]) -> Vec<Option<f64>> {
        (**self).score_candidates(user, candidates)
    }
}
