//! Candidate generation, top-k ranking, and ranking metrics.
//!
//! Candidates for a user are exactly the target city's training venues
//! minus the venues already in the user's merged training profile, so no
//! source-city venue and no already-visited venue can ever be recommended.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::crossdomain::TrainingScope;
use crate::error::{Error, Result};
use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::recommend::Recommender;

/// One evaluation unit: a fitted scope plus the target city's test set.
pub struct EvaluationTask<'a> {
    pub scope: &'a TrainingScope,
    /// Test interactions of the target city only.
    pub test: &'a InteractionSet,
    pub cutoff: usize,
}

impl<'a> EvaluationTask<'a> {
    pub fn new(scope: &'a TrainingScope, test: &'a InteractionSet, cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Config("cutoff must be >= 1".into()));
        }
        Ok(Self {
            scope,
            test,
            cutoff,
        })
    }
}

/// Top-k recommendation list for one user, scores strictly descending
/// (ties resolved by ascending venue id before truncation).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub user: UserId,
    pub items: Vec<(VenueId, f64)>,
}

impl RankedList {
    pub fn venues(&self) -> Vec<VenueId> {
        self.items.iter().map(|&(v, _)| v).collect()
    }
}

/// Candidate venues for a user under the TrainItems protocol: the target
/// city's training venues minus everything in the user's merged profile.
pub fn candidate_set(user: UserId, scope: &TrainingScope) -> Vec<VenueId> {
    let trained: BTreeSet<VenueId> = scope.merged_train.venues_of(user).iter().copied().collect();
    scope
        .target_train_venues
        .iter()
        .copied()
        .filter(|v| !trained.contains(v))
        .collect()
}

/// Score candidates and keep the top `cutoff`. Candidates the model cannot
/// score are dropped; `None` when nothing is scoreable.
pub fn rank<M: Recommender + ?Sized>(
    model: &M,
    user: UserId,
    candidates: &[VenueId],
    cutoff: usize,
) -> Option<RankedList> {
    let scores = model.score_candidates(user, candidates);
    let mut scored: Vec<(VenueId, f64)> = candidates
        .iter()
        .zip(scores)
        .filter_map(|(&v, s)| s.map(|s| (v, s)))
        .collect();
    if scored.is_empty() {
        return None;
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(cutoff);
    Some(RankedList {
        user,
        items: scored,
    })
}

/// Binary-relevance nDCG with a log2(pos + 1) discount; the ideal ranking
/// places min(|relevant|, k) relevant items first. 0 when nothing is
/// relevant.
pub fn ndcg_at_k(ranking: &[VenueId], relevant: &BTreeSet<VenueId>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let dcg: f64 = ranking
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, v)| relevant.contains(v))
        .map(|(pos, _)| 1.0 / ((pos + 2) as f64).log2())
        .sum();
    let ideal: f64 = (0..relevant.len().min(k))
        .map(|pos| 1.0 / ((pos + 2) as f64).log2())
        .sum();
    dcg / ideal
}

/// Hits over k; the denominator stays k even for shorter rankings.
pub fn precision_at_k(ranking: &[VenueId], relevant: &BTreeSet<VenueId>, k: usize) -> f64 {
    let hits = ranking
        .iter()
        .take(k)
        .filter(|v| relevant.contains(v))
        .count();
    hits as f64 / k as f64
}

/// Hits over the number of relevant items; 0 when nothing is relevant.
pub fn recall_at_k(ranking: &[VenueId], relevant: &BTreeSet<VenueId>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let hits = ranking
        .iter()
        .take(k)
        .filter(|v| relevant.contains(v))
        .count();
    hits as f64 / relevant.len() as f64
}

/// Metrics for one evaluated user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserMetrics {
    pub user: UserId,
    pub ndcg: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Per-user metrics plus aggregates and coverage accounting.
///
/// `ndcg`/`precision`/`recall` average over covered users only (the
/// default); the `_all` variants spread the same mass over covered plus
/// abstained users.
#[derive(Debug, Clone, Default)]
pub struct MetricReport {
    pub cutoff: usize,
    pub per_user: Vec<UserMetrics>,
    pub evaluated_users: usize,
    pub abstained_users: usize,
    /// Users with an empty candidate set; they are never offered to the
    /// model.
    pub skipped_users: usize,
    /// Test venues outside the target city's training venues: unreachable
    /// under this protocol and excluded from the relevant sets.
    pub excluded_test_venues: usize,
    pub ndcg: f64,
    pub precision: f64,
    pub recall: f64,
    pub ndcg_all: f64,
    pub precision_all: f64,
    pub recall_all: f64,
}

impl MetricReport {
    /// Fraction of offered users the model could rank for.
    pub fn coverage(&self) -> f64 {
        let offered = self.evaluated_users + self.abstained_users;
        if offered == 0 {
            0.0
        } else {
            self.evaluated_users as f64 / offered as f64
        }
    }
}

/// Evaluate a fitted model against every test user of the task's target
/// city. Deterministic: per-user work is parallel but aggregation runs in
/// ascending user order.
pub fn evaluate<M: Recommender + ?Sized + Sync>(model: &M, task: &EvaluationTask) -> MetricReport {
    let users: Vec<UserId> = task.test.users().collect();
    let cutoff = task.cutoff;

    enum Outcome {
        Skipped,
        Abstained {
            excluded: usize,
        },
        Evaluated {
            metrics: UserMetrics,
            excluded: usize,
        },
    }

    let outcomes: Vec<Outcome> = users
        .par_iter()
        .map(|&user| {
            let candidates = candidate_set(user, task.scope);
            if candidates.is_empty() {
                return Outcome::Skipped;
            }
            let test_venues = task.test.venues_of(user);
            let relevant: BTreeSet<VenueId> = test_venues
                .iter()
                .copied()
                .filter(|v| task.scope.target_train_venues.contains(v))
                .collect();
            let excluded = test_venues.len() - relevant.len();
            match rank(model, user, &candidates, cutoff) {
                None => Outcome::Abstained { excluded },
                Some(list) => {
                    let venues = list.venues();
                    let metrics = UserMetrics {
                        user,
                        ndcg: ndcg_at_k(&venues, &relevant, cutoff),
                        precision: precision_at_k(&venues, &relevant, cutoff),
                        recall: recall_at_k(&venues, &relevant, cutoff),
                    };
                    Outcome::Evaluated { metrics, excluded }
                }
            }
        })
        .collect();

    let mut report = MetricReport {
        cutoff,
        ..Default::default()
    };
    let (mut ndcg_sum, mut prec_sum, mut rec_sum) = (0.0, 0.0, 0.0);
    for outcome in outcomes {
        match outcome {
            Outcome::Skipped => report.skipped_users += 1,
            Outcome::Abstained { excluded } => {
                report.abstained_users += 1;
                report.excluded_test_venues += excluded;
            }
            Outcome::Evaluated { metrics, excluded } => {
                report.evaluated_users += 1;
                report.excluded_test_venues += excluded;
                ndcg_sum += metrics.ndcg;
                prec_sum += metrics.precision;
                rec_sum += metrics.recall;
                report.per_user.push(metrics);
            }
        }
    }
    let covered = report.evaluated_users;
    let offered = covered + report.abstained_users;
    let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
    report.ndcg = mean(ndcg_sum, covered);
    report.precision = mean(prec_sum, covered);
    report.recall = mean(rec_sum, covered);
    report.ndcg_all = mean(ndcg_sum, offered);
    report.precision_all = mean(prec_sum, offered);
    report.recall_all = mean(rec_sum, offered);
    report
}

/// Relative change of a cross-domain value versus the single-domain value,
/// in percent; undefined for a nonpositive baseline.
pub fn delta_percent(cd_value: f64, sd_value: f64) -> Option<f64> {
    if sd_value <= 0.0 {
        None
    } else {
        Some(100.0 * (cd_value - sd_value) / sd_value)
    }
}
