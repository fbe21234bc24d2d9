//! Geographic baseline: rank venues by distance to the center of the
//! user's visited venues, nearest first.

use std::collections::HashMap;

use crate::geo::{geographic_midpoint, haversine_km, GeoPoint};
use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::types::VenueTable;

use super::Recommender;

#[derive(Debug, Clone)]
pub struct AvgDis {
    /// Users whose training venues produced a valid midpoint. Users with a
    /// degenerate midpoint (venues canceling out on the sphere) abstain.
    centroids: HashMap<UserId, GeoPoint>,
    locations: HashMap<VenueId, GeoPoint>,
}

impl AvgDis {
    pub fn fit(train: &InteractionSet, venues: &VenueTable) -> Self {
        let mut centroids = HashMap::new();
        for user in train.users() {
            let points: Vec<GeoPoint> = train
                .venues_of(user)
                .iter()
                .filter_map(|&v| venues.location(v).ok())
                .collect();
            if let Ok(mid) = geographic_midpoint(&points) {
                centroids.insert(user, mid);
            }
        }
        let locations = venues.iter().map(|r| (r.venue, r.location)).collect();
        Self {
            centroids,
            locations,
        }
    }

    pub fn centroid(&self, user: UserId) -> Option<GeoPoint> {
        self.centroids.get(&user).copied()
    }
}

impl Recommender for AvgDis {
    fn name(&self) -> &str {
        "avgdis"
    }

    /// Negated distance in kilometers, so nearer venues score higher.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        let centroid = self.centroids.get(&user)?;
        let location = self.locations.get(&venue)?;
        Some(-haversine_km(*centroid, *location))
    }
}
