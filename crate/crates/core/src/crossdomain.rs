//! Training-scope construction: single-domain, nearest-n, and
//! most-popular-n source-city selection, plus the common-user overlap
//! diagnostics.
//!
//! Venues never overlap between cities, so merging partitions is a plain
//! union; users keep one handle corpus-wide, which is what realizes
//! cross-city user overlap in the merged matrix.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geo::{geographic_midpoint, haversine_km, GeoPoint};
use crate::ids::{CityId, UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::types::VenueTable;

/// How the source cities of a training scope are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Only the target city.
    SingleDomain,
    /// Target plus the n geographically nearest other cities.
    NearestCd(usize),
    /// Target plus the n other cities with the most training check-ins.
    PopularCd(usize),
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::SingleDomain => write!(f, "single"),
            Strategy::NearestCd(n) => write!(f, "ncd:{n}"),
            Strategy::PopularCd(n) => write!(f, "pcd:{n}"),
        }
    }
}

/// Per-city training summary: centroid of its training venues, check-in
/// count, and the user set.
#[derive(Debug, Clone)]
pub struct CityProfile {
    pub city: CityId,
    pub centroid: GeoPoint,
    pub train_checkin_count: usize,
    pub train_users: BTreeSet<UserId>,
}

/// Build a profile per city from its training partition.
pub fn build_profiles(
    partitions: &BTreeMap<CityId, InteractionSet>,
    venues: &VenueTable,
) -> Result<BTreeMap<CityId, CityProfile>> {
    partitions
        .iter()
        .map(|(&city, part)| {
            let points: Vec<GeoPoint> = part
                .venues()
                .map(|v| venues.location(v))
                .collect::<Result<_>>()?;
            let centroid = geographic_midpoint(&points)?;
            Ok((
                city,
                CityProfile {
                    city,
                    centroid,
                    train_checkin_count: part.len(),
                    train_users: part.users().collect(),
                },
            ))
        })
        .collect()
}

/// Distance between two cities' venue centroids, in kilometers.
pub fn city_distance(a: &CityProfile, b: &CityProfile) -> f64 {
    haversine_km(a.centroid, b.centroid)
}

/// The n cities nearest to `target` (target excluded), closest first;
/// ties break by ascending city id.
pub fn nearest_cities(
    target: CityId,
    profiles: &BTreeMap<CityId, CityProfile>,
    n: usize,
) -> Result<Vec<CityId>> {
    let target_profile = profiles
        .get(&target)
        .ok_or_else(|| Error::Config(format!("unknown target city {}", target.0)))?;
    if n > profiles.len().saturating_sub(1) {
        return Err(Error::Config(format!(
            "requested {n} nearest cities but only {} others exist",
            profiles.len().saturating_sub(1)
        )));
    }
    let mut others: Vec<(CityId, f64)> = profiles
        .values()
        .filter(|p| p.city != target)
        .map(|p| (p.city, city_distance(target_profile, p)))
        .collect();
    others.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(others.into_iter().take(n).map(|(c, _)| c).collect())
}

/// The m cities with the most training check-ins, descending; ties break
/// by ascending city id.
pub fn top_popular_cities(profiles: &BTreeMap<CityId, CityProfile>, m: usize) -> Vec<CityId> {
    let mut all: Vec<(CityId, usize)> = profiles
        .values()
        .map(|p| (p.city, p.train_checkin_count))
        .collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    all.into_iter().take(m).map(|(c, _)| c).collect()
}

/// A target city plus the selected source-city training data, merged.
#[derive(Debug, Clone)]
pub struct TrainingScope {
    pub target: CityId,
    pub strategy: Strategy,
    /// Target first, then the selected sources in strategy order.
    pub source_cities: Vec<CityId>,
    pub merged_train: InteractionSet,
    /// Venue universe of the target city's own training partition; the
    /// evaluation protocol only ever recommends these.
    pub target_train_venues: BTreeSet<VenueId>,
}

/// Merge the training partitions selected by `strategy` for `target`.
pub fn build_scope(
    target: CityId,
    strategy: Strategy,
    partitions: &BTreeMap<CityId, InteractionSet>,
    profiles: &BTreeMap<CityId, CityProfile>,
) -> Result<TrainingScope> {
    let target_part = partitions
        .get(&target)
        .ok_or_else(|| Error::Config(format!("unknown target city {}", target.0)))?;

    let mut source_cities = vec![target];
    match strategy {
        Strategy::SingleDomain => {}
        Strategy::NearestCd(n) => source_cities.extend(nearest_cities(target, profiles, n)?),
        Strategy::PopularCd(n) => {
            if n > profiles.len().saturating_sub(1) {
                return Err(Error::Config(format!(
                    "requested {n} popular cities but only {} others exist",
                    profiles.len().saturating_sub(1)
                )));
            }
            source_cities.extend(
                top_popular_cities(profiles, profiles.len())
                    .into_iter()
                    .filter(|&c| c != target)
                    .take(n),
            );
        }
    }

    let merged_train =
        InteractionSet::from_triples(source_cities.iter().flat_map(|c| partitions[c].iter()))?;
    let target_train_venues = target_part.venues().collect();

    Ok(TrainingScope {
        target,
        strategy,
        source_cities,
        merged_train,
        target_train_venues,
    })
}

/// Fraction of users shared by two cities: |A n B| / |A u B|, 0 when both
/// are empty.
pub fn common_users(a: &CityProfile, b: &CityProfile) -> f64 {
    let inter = a.train_users.intersection(&b.train_users).count();
    let union = a.train_users.len() + b.train_users.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mean of `common_users(target, c)` over the strategy's source cities,
/// target excluded; 0 when the strategy selects no other city.
pub fn avg_common_users(
    target: CityId,
    strategy: Strategy,
    profiles: &BTreeMap<CityId, CityProfile>,
) -> Result<f64> {
    let target_profile = profiles
        .get(&target)
        .ok_or_else(|| Error::Config(format!("unknown target city {}", target.0)))?;
    let sources: Vec<CityId> = match strategy {
        Strategy::SingleDomain => Vec::new(),
        Strategy::NearestCd(n) => nearest_cities(target, profiles, n)?,
        Strategy::PopularCd(n) => top_popular_cities(profiles, profiles.len())
            .into_iter()
            .filter(|&c| c != target)
            .take(n)
            .collect(),
    };
    if sources.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = sources
        .iter()
        .map(|c| common_users(target_profile, &profiles[c]))
        .sum();
    Ok(total / sources.len() as f64)
}
