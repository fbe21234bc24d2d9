//! The deduplicated binary user x venue matrix.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ids::{UserId, VenueId};

/// One user's row: venues visited (sorted) with the earliest local
/// timestamp per venue, kept in parallel arrays.
#[derive(Debug, Clone, Default)]
pub struct UserRow {
    venues: Vec<VenueId>,
    times: Vec<i64>,
}

impl UserRow {
    pub fn venues(&self) -> &[VenueId] {
        &self.venues
    }

    pub fn contains(&self, venue: VenueId) -> bool {
        self.venues.binary_search(&venue).is_ok()
    }

    pub fn timestamp(&self, venue: VenueId) -> Option<i64> {
        self.venues
            .binary_search(&venue)
            .ok()
            .map(|i| self.times[i])
    }

    pub fn len(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VenueId, i64)> + '_ {
        self.venues.iter().copied().zip(self.times.iter().copied())
    }
}

/// Sparse binary interaction matrix with row and column indexes that are
/// exact transposes of each other. Only users/venues with at least one
/// interaction are present; timestamps are the earliest local visit.
#[derive(Debug, Clone, Default)]
pub struct InteractionSet {
    rows: BTreeMap<UserId, UserRow>,
    cols: BTreeMap<VenueId, Vec<UserId>>,
    len: usize,
}

impl InteractionSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from (user, venue, local timestamp) triples.
    /// Duplicate (user, venue) pairs are a data error.
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (UserId, VenueId, i64)>,
    {
        let mut rows: BTreeMap<UserId, Vec<(VenueId, i64)>> = BTreeMap::new();
        let mut len = 0usize;
        for (u, v, t) in triples {
            rows.entry(u).or_default().push((v, t));
            len += 1;
        }

        let mut cols: BTreeMap<VenueId, Vec<UserId>> = BTreeMap::new();
        let mut built = BTreeMap::new();
        for (u, mut row) in rows {
            row.sort_unstable_by_key(|&(v, _)| v);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Data(format!(
                        "duplicate interaction (user {}, venue {})",
                        u.0, w[0].0 .0
                    )));
                }
            }
            for &(v, _) in &row {
                cols.entry(v).or_default().push(u);
            }
            let (venues, times) = row.into_iter().unzip();
            built.insert(u, UserRow { venues, times });
        }
        // Column user lists come out sorted because rows are visited in order.
        Ok(Self {
            rows: built,
            cols,
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn user_count(&self) -> usize {
        self.rows.len()
    }

    pub fn venue_count(&self) -> usize {
        self.cols.len()
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.rows.keys().copied()
    }

    pub fn venues(&self) -> impl Iterator<Item = VenueId> + '_ {
        self.cols.keys().copied()
    }

    pub fn row(&self, user: UserId) -> Option<&UserRow> {
        self.rows.get(&user)
    }

    /// Venues visited by `user`; empty for unknown users.
    pub fn venues_of(&self, user: UserId) -> &[VenueId] {
        self.rows.get(&user).map(|r| r.venues()).unwrap_or(&[])
    }

    /// Users who visited `venue`, sorted; empty for unknown venues.
    pub fn users_of(&self, venue: VenueId) -> &[UserId] {
        self.cols.get(&venue).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn contains(&self, user: UserId, venue: VenueId) -> bool {
        self.rows.get(&user).is_some_and(|r| r.contains(venue))
    }

    pub fn timestamp(&self, user: UserId, venue: VenueId) -> Option<i64> {
        self.rows.get(&user).and_then(|r| r.timestamp(venue))
    }

    /// All interactions in (user, venue) order.
    pub fn iter(&self) -> impl Iterator<Item = (UserId, VenueId, i64)> + '_ {
        self.rows
            .iter()
            .flat_map(|(&u, row)| row.iter().map(move |(v, t)| (u, v, t)))
    }

    /// Fraction of the user x venue grid that is filled.
    pub fn density(&self) -> f64 {
        let cells = self.user_count() * self.venue_count();
        if cells == 0 {
            0.0
        } else {
            self.len as f64 / cells as f64
        }
    }

    /// Content fingerprint; equal sets hash equal regardless of how they
    /// were assembled.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        };
        for (u, v, t) in self.iter() {
            mix(u.0 as u64);
            mix(v.0 as u64);
            mix(t as u64);
        }
        h
    }
}
