//! City-as-domain venue recommendation.
//!
//! Ingests raw check-in logs, builds per-city training scopes (single
//! city, nearest-n cities, or most-popular-n cities), fits a family of
//! collaborative, geographic, and hybrid recommenders, and evaluates them
//! under a temporal split where candidates are the target city's training
//! venues.

pub mod crossdomain;
pub mod error;
pub mod evaluation;
pub mod fixture;
pub mod geo;
pub mod ids;
pub mod ingest;
pub mod interactions;
pub mod preprocess;
pub mod recommend;
pub mod rng;
pub mod similarity;
pub mod types;

pub use error::{Error, Result};
pub use ids::{CityId, UserId, VenueId};
pub use interactions::InteractionSet;
