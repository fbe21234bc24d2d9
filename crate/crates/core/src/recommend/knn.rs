//! Neighborhood models: user-based and item-based k-NN over binary sets.
//!
//! Only strictly positive similarities qualify for a neighborhood; ties at
//! the k-th slot are broken by ascending identifier so runs are
//! reproducible.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::similarity::SimilarityKind;

use super::Recommender;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnParams {
    pub similarity: SimilarityKind,
    pub k: usize,
}

impl KnnParams {
    pub fn new(similarity: SimilarityKind, k: usize) -> Result<Self> {
        similarity.validate()?;
        if k < 1 {
            return Err(Error::Config(format!("neighborhood size {k} must be >= 1")));
        }
        Ok(Self { similarity, k })
    }
}

fn top_k_neighbors(mut sims: Vec<(u32, f64)>, k: usize) -> Vec<(u32, f64)> {
    sims.sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    sims.truncate(k);
    sims
}

/// User-based k-NN: score(u, i) sums the similarities of u's neighbors
/// that visited i.
#[derive(Debug)]
pub struct UserKnn {
    params: KnnParams,
    rows: BTreeMap<UserId, Vec<VenueId>>,
    neighbors: HashMap<UserId, Vec<(UserId, f64)>>,
}

impl UserKnn {
    pub fn fit(train: &InteractionSet, params: KnnParams) -> Self {
        let users: Vec<UserId> = train.users().collect();
        let neighbors: HashMap<UserId, Vec<(UserId, f64)>> = users
            .par_iter()
            .map(|&u| {
                let own = train.venues_of(u);
                // co-visitor counting through the column index
                let mut overlap: HashMap<UserId, usize> = HashMap::new();
                for &v in own {
                    for &other in train.users_of(v) {
                        if other != u {
                            *overlap.entry(other).or_insert(0) += 1;
                        }
                    }
                }
                let sims: Vec<(u32, f64)> = overlap
                    .into_iter()
                    .map(|(other, inter)| {
                        let sim = params.similarity.from_counts(
                            inter,
                            own.len(),
                            train.venues_of(other).len(),
                        );
                        (other.0, sim)
                    })
                    .filter(|&(_, sim)| sim > 0.0)
                    .collect();
                let top = top_k_neighbors(sims, params.k)
                    .into_iter()
                    .map(|(id, sim)| (UserId(id), sim))
                    .collect();
                (u, top)
            })
            .collect();

        let rows = users
            .into_iter()
            .map(|u| (u, train.venues_of(u).to_vec()))
            .collect();
        Self {
            params,
            rows,
            neighbors,
        }
    }

    pub fn params(&self) -> KnnParams {
        self.params
    }

    fn usable_neighbors(&self, user: UserId) -> Option<&[(UserId, f64)]> {
        match self.neighbors.get(&user) {
            Some(n) if !n.is_empty() => Some(n),
            _ => None,
        }
    }
}

impl Recommender for UserKnn {
    fn name(&self) -> &str {
        "ub"
    }

    /// `None` when the user has no positive-similarity neighbor.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        let neighbors = self.usable_neighbors(user)?;
        let mut s = 0.0;
        for &(v, sim) in neighbors {
            if self.rows[&v].binary_search(&venue).is_ok() {
                s += sim;
            }
        }
        Some(s)
    }

    /// Accumulates each neighbor's venues once instead of probing per
    /// candidate; identical sums to `score` because the neighbor order is
    /// the same.
    fn score_candidates(&self, user: UserId, candidates: &[VenueId]) -> Vec<Option<f64>> {
        let Some(neighbors) = self.usable_neighbors(user) else {
            return vec![None; candidates.len()];
        };
        let mut acc: HashMap<VenueId, f64> = HashMap::new();
        for &(v, sim) in neighbors {
            for &venue in &self.rows[&v] {
                *acc.entry(venue).or_insert(0.0) += sim;
            }
        }
        candidates
            .iter()
            .map(|v| Some(acc.get(v).copied().unwrap_or(0.0)))
            .collect()
    }
}

/// Item-based k-NN: score(u, i) sums similarity(i, j) over the neighbors j
/// of i that u visited.
#[derive(Debug)]
pub struct ItemKnn {
    params: KnnParams,
    rows: BTreeMap<UserId, Vec<VenueId>>,
    neighbors: HashMap<VenueId, Vec<(VenueId, f64)>>,
}

impl ItemKnn {
    pub fn fit(train: &InteractionSet, params: KnnParams) -> Self {
        let venues: Vec<VenueId> = train.venues().collect();
        let neighbors: HashMap<VenueId, Vec<(VenueId, f64)>> = venues
            .par_iter()
            .map(|&i| {
                let own = train.users_of(i);
                let mut overlap: HashMap<VenueId, usize> = HashMap::new();
                for &u in own {
                    for &other in train.venues_of(u) {
                        if other != i {
                            *overlap.entry(other).or_insert(0) += 1;
                        }
                    }
                }
                let sims: Vec<(u32, f64)> = overlap
                    .into_iter()
                    .map(|(other, inter)| {
                        let sim = params.similarity.from_counts(
                            inter,
                            own.len(),
                            train.users_of(other).len(),
                        );
                        (other.0, sim)
                    })
                    .filter(|&(_, sim)| sim > 0.0)
                    .collect();
                let top = top_k_neighbors(sims, params.k)
                    .into_iter()
                    .map(|(id, sim)| (VenueId(id), sim))
                    .collect();
                (i, top)
            })
            .collect();

        let rows = train
            .users()
            .map(|u| (u, train.venues_of(u).to_vec()))
            .collect();
        Self {
            params,
            rows,
            neighbors,
        }
    }

    pub fn params(&self) -> KnnParams {
        self.params
    }
}

impl Recommender for ItemKnn {
    fn name(&self) -> &str {
        "ib"
    }

    /// `None` for users absent from training and for venues with no
    /// positive-similarity neighbor.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        let row = self.rows.get(&user)?;
        let neighbors = match self.neighbors.get(&venue) {
            Some(n) if !n.is_empty() => n,
            _ => return None,
        };
        let mut s = 0.0;
        for &(j, sim) in neighbors {
            if row.binary_search(&j).is_ok() {
                s += sim;
            }
        }
        Some(s)
    }
}
