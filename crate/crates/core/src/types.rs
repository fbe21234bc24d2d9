//! Check-in events, venue records, and local-time arithmetic.

use chrono::{DateTime, NaiveDate};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::ids::{CityId, UserId, VenueId};

/// Smallest / largest timezone offsets observed in the wild, in minutes.
pub const MIN_TZ_OFFSET_MIN: i32 = -720;
pub const MAX_TZ_OFFSET_MIN: i32 = 840;

/// One raw visit event. Times are integer seconds since the Unix epoch;
/// the offset converts UTC into the local clock of the venue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckIn {
    pub user: UserId,
    pub venue: VenueId,
    pub utc_time: i64,
    pub tz_offset_min: i32,
}

impl CheckIn {
    /// Local timestamp: UTC time plus the offset.
    pub fn local_time(&self) -> i64 {
        self.utc_time + 60 * self.tz_offset_min as i64
    }

    /// Local calendar date of the event.
    pub fn local_date(&self) -> NaiveDate {
        date_of_timestamp(self.local_time())
    }
}

/// Calendar date of an epoch timestamp (proleptic Gregorian, no DST logic;
/// offsets are already folded into the timestamp by the caller).
pub fn date_of_timestamp(secs: i64) -> NaiveDate {
    DateTime::from_timestamp(secs, 0)
        .expect("timestamp validated at ingestion")
        .date_naive()
}

/// Venue coordinates and city membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VenueRecord {
    pub venue: VenueId,
    pub location: GeoPoint,
    pub city: CityId,
}

/// Per-venue side table, dense by `VenueId`. Every interned venue has
/// exactly one record, so lookups are total for well-formed corpora.
#[derive(Debug, Clone, Default)]
pub struct VenueTable {
    records: Vec<VenueRecord>,
}

impl VenueTable {
    pub fn new(records: Vec<VenueRecord>) -> Self {
        debug_assert!(records
            .iter()
            .enumerate()
            .all(|(i, r)| r.venue.index() == i));
        Self { records }
    }

    pub fn get(&self, venue: VenueId) -> Result<&VenueRecord> {
        self.records
            .get(venue.index())
            .ok_or_else(|| Error::Data(format!("venue {} has no record", venue.0)))
    }

    pub fn location(&self, venue: VenueId) -> Result<GeoPoint> {
        Ok(self.get(venue)?.location)
    }

    pub fn city(&self, venue: VenueId) -> Result<CityId> {
        Ok(self.get(venue)?.city)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VenueRecord> {
        self.records.iter()
    }
}
