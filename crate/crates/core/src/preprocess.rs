//! Deduplication, k-core filtering, the temporal split, city partitioning,
//! and corpus statistics.
//!
//! Pipeline order is fixed: parse -> local time -> deduplicate -> k-core ->
//! temporal split -> per-city partition. Dedup runs before the k-core so
//! that "k preferences" counts distinct venues, matching the binary
//! matrices the recommenders consume.

use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ids::{CityId, UserId, VenueId};
use crate::ingest::RawCorpus;
use crate::interactions::InteractionSet;
use crate::types::{date_of_timestamp, VenueTable};

/// Closed local-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!(
                "date range starts {start} after it ends {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn overlaps(&self, other: &DateRange) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Train/test interaction sets with the windows that produced them.
#[derive(Debug)]
pub struct TemporalSplit {
    pub train: InteractionSet,
    pub test: InteractionSet,
    pub train_window: DateRange,
    pub test_window: DateRange,
    /// Interactions outside both windows.
    pub discarded: usize,
}

/// Corpus statistics: counts and the ratios derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub users: usize,
    pub items: usize,
    pub checkins: usize,
    pub density: f64,
    pub checkins_per_user: f64,
    pub checkins_per_item: f64,
}

/// Collapse repeated visits: one interaction per (user, venue), keeping the
/// earliest local timestamp so the split assigns the pair to the first time
/// the preference was expressed.
pub fn deduplicate(corpus: &RawCorpus) -> InteractionSet {
    let mut earliest: HashMap<(UserId, VenueId), i64> = HashMap::new();
    for c in &corpus.checkins {
        let t = c.local_time();
        earliest
            .entry((c.user, c.venue))
            .and_modify(|cur| *cur = (*cur).min(t))
            .or_insert(t);
    }
    InteractionSet::from_triples(earliest.into_iter().map(|((u, v), t)| (u, v, t)))
        .expect("deduplicated pairs are unique")
}

/// Maximal subgraph in which every surviving user and venue has at least
/// `k` interactions. Iterates removal to a fixed point; the result is
/// independent of removal order and may be empty.
pub fn k_core(data: &InteractionSet, k: usize) -> Result<InteractionSet> {
    if k < 1 {
        return Err(Error::Config("k-core requires k >= 1".into()));
    }

    let mut user_degree: BTreeMap<UserId, usize> =
        data.users().map(|u| (u, data.venues_of(u).len())).collect();
    let mut venue_degree: BTreeMap<VenueId, usize> =
        data.venues().map(|v| (v, data.users_of(v).len())).collect();

    let mut dead_users: Vec<UserId> = Vec::new();
    let mut dead_venues: Vec<VenueId> = Vec::new();
    let mut user_queue: Vec<UserId> = user_degree
        .iter()
        .filter(|&(_, &d)| d < k)
        .map(|(&u, _)| u)
        .collect();
    let mut venue_queue: Vec<VenueId> = venue_degree
        .iter()
        .filter(|&(_, &d)| d < k)
        .map(|(&v, _)| v)
        .collect();

    while !user_queue.is_empty() || !venue_queue.is_empty() {
        while let Some(u) = user_queue.pop() {
            if user_degree.remove(&u).is_none() {
                continue;
            }
            dead_users.push(u);
            for &v in data.venues_of(u) {
                if let Some(d) = venue_degree.get_mut(&v) {
                    *d -= 1;
                    if *d < k {
                        venue_queue.push(v);
                    }
                }
            }
        }
        while let Some(v) = venue_queue.pop() {
            if venue_degree.remove(&v).is_none() {
                continue;
            }
            dead_venues.push(v);
            for &u in data.users_of(v) {
                if let Some(d) = user_degree.get_mut(&u) {
                    *d -= 1;
                    if *d < k {
                        user_queue.push(u);
                    }
                }
            }
        }
    }

    let triples = data
        .iter()
        .filter(|(u, v, _)| user_degree.contains_key(u) && venue_degree.contains_key(v));
    InteractionSet::from_triples(triples)
}

/// Assign each interaction to train or test by the local calendar date of
/// its earliest timestamp; interactions outside both windows are dropped.
pub fn temporal_split(
    data: &InteractionSet,
    train_window: DateRange,
    test_window: DateRange,
) -> Result<TemporalSplit> {
    if train_window.overlaps(&test_window) {
        return Err(Error::Config(format!(
            "train window {}..{} overlaps test window {}..{}",
            train_window.start, train_window.end, test_window.start, test_window.end
        )));
    }
    if train_window.end >= test_window.start {
        return Err(Error::Config(
            "train window must precede test window".into(),
        ));
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut discarded = 0usize;
    for (u, v, t) in data.iter() {
        let date = date_of_timestamp(t);
        if train_window.contains(date) {
            train.push((u, v, t));
        } else if test_window.contains(date) {
            test.push((u, v, t));
        } else {
            discarded += 1;
        }
    }

    Ok(TemporalSplit {
        train: InteractionSet::from_triples(train)?,
        test: InteractionSet::from_triples(test)?,
        train_window,
        test_window,
        discarded,
    })
}

/// Split interactions by the city of their venue. Every interaction lands
/// in exactly one partition; a user may appear in many partitions.
pub fn partition_by_city(
    data: &InteractionSet,
    venues: &VenueTable,
) -> Result<BTreeMap<CityId, InteractionSet>> {
    let mut by_city: BTreeMap<CityId, Vec<(UserId, VenueId, i64)>> = BTreeMap::new();
    for (u, v, t) in data.iter() {
        let city = venues.city(v)?;
        by_city.entry(city).or_default().push((u, v, t));
    }
    by_city
        .into_iter()
        .map(|(city, triples)| Ok((city, InteractionSet::from_triples(triples)?)))
        .collect()
}

/// Exact counts plus derived ratios; ratios are 0 for an empty set.
pub fn corpus_stats(data: &InteractionSet) -> CorpusStats {
    let users = data.user_count();
    let items = data.venue_count();
    let checkins = data.len();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    CorpusStats {
        users,
        items,
        checkins,
        density: data.density(),
        checkins_per_user: ratio(checkins, users),
        checkins_per_item: ratio(checkins, items),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_corpus;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn set(triples: &[(u32, u32, i64)]) -> InteractionSet {
        InteractionSet::from_triples(triples.iter().map(|&(u, v, t)| (UserId(u), VenueId(v), t)))
            .unwrap()
    }

    fn corpus_from(checkins: &str, venues: &str) -> RawCorpus {
        parse_corpus(checkins.as_bytes(), venues.as_bytes())
            .unwrap()
            .0
    }

    #[test]
    fn dedup_keeps_minimum_local_time() {
        let venues = "v1\t0\t0\tA\n";
        let checkins = "u1\tv1\t100\t0\nu1\tv1\t50\t0\nu1\tv1\t200\t0\n";
        let corpus = corpus_from(checkins, venues);
        let s = deduplicate(&corpus);
        assert_eq!(s.len(), 1);
        assert_eq!(s.timestamp(UserId(0), VenueId(0)), Some(50));
    }

    #[test]
    fn dedup_on_duplicate_free_corpus_is_identity() {
        let venues = "v1\t0\t0\tA\nv2\t0\t1\tA\n";
        let checkins = "u1\tv1\t100\t0\nu1\tv2\t50\t0\nu2\tv1\t10\t0\n";
        let corpus = corpus_from(checkins, venues);
        assert_eq!(deduplicate(&corpus).len(), corpus.checkins.len());
    }

    #[test]
    fn dedup_is_per_user_venue_pair() {
        let venues = "v1\t0\t0\tA\n";
        let checkins = "u1\tv1\t100\t0\nu2\tv1\t100\t0\n";
        let corpus = corpus_from(checkins, venues);
        assert_eq!(deduplicate(&corpus).len(), 2);
    }

    #[test]
    fn k_core_leaves_a_2core_unchanged() {
        let s = set(&[(1, 1, 0), (1, 2, 0), (2, 1, 0), (2, 2, 0)]);
        let out = k_core(&s, 2).unwrap();
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn k_core_cascades_removals() {
        // u1:{i1}, u2:{i1,i2}, u3:{i2,i3,i4}, u4:{i3,i4}; removing u1 kills
        // i1, which kills u2, which kills i2; u3 and u4 survive on i3, i4.
        let s = set(&[
            (1, 1, 0),
            (2, 1, 0),
            (2, 2, 0),
            (3, 2, 0),
            (3, 3, 0),
            (3, 4, 0),
            (4, 3, 0),
            (4, 4, 0),
        ]);
        let out = k_core(&s, 2).unwrap();
        let pairs: Vec<_> = out.iter().map(|(u, v, _)| (u.0, v.0)).collect();
        assert_eq!(pairs, vec![(3, 3), (3, 4), (4, 3), (4, 4)]);
    }

    #[test]
    fn k_core_with_k1_is_identity_on_wellformed_sets() {
        let s = set(&[(1, 1, 0), (2, 5, 0), (3, 5, 0)]);
        assert_eq!(k_core(&s, 1).unwrap().len(), s.len());
    }

    #[test]
    fn k_core_may_be_empty_and_is_idempotent() {
        let s = set(&[(1, 1, 0), (2, 2, 0)]);
        let once = k_core(&s, 2).unwrap();
        assert!(once.is_empty());
        let twice = k_core(&once, 2).unwrap();
        assert!(twice.is_empty());
    }

    #[test]
    fn k_core_rejects_k_zero() {
        assert!(k_core(&InteractionSet::empty(), 0).is_err());
    }

    #[test]
    fn split_assigns_by_local_date() {
        let day = |y, m, d| {
            date(y, m, d)
                .and_hms_opt(12, 0, 0)
                .unwrap()
                .and_utc()
                .timestamp()
        };
        let s = set(&[
            (1, 1, day(2012, 5, 1)),
            (1, 2, day(2012, 10, 31)),
            (1, 3, day(2012, 11, 1)),
            (1, 4, day(2012, 12, 5)),
        ]);
        let split = temporal_split(
            &s,
            DateRange::new(date(2012, 5, 1), date(2012, 10, 31)).unwrap(),
            DateRange::new(date(2012, 11, 1), date(2012, 11, 30)).unwrap(),
        )
        .unwrap();
        assert_eq!(split.train.len(), 2);
        assert_eq!(split.test.len(), 1);
        assert_eq!(split.discarded, 1);
    }

    #[test]
    fn split_of_empty_set_is_empty() {
        let split = temporal_split(
            &InteractionSet::empty(),
            DateRange::new(date(2012, 5, 1), date(2012, 10, 31)).unwrap(),
            DateRange::new(date(2012, 11, 1), date(2012, 11, 30)).unwrap(),
        )
        .unwrap();
        assert!(split.train.is_empty() && split.test.is_empty());
    }

    #[test]
    fn overlapping_windows_are_a_config_error() {
        let r = temporal_split(
            &InteractionSet::empty(),
            DateRange::new(date(2012, 5, 1), date(2012, 11, 2)).unwrap(),
            DateRange::new(date(2012, 11, 1), date(2012, 11, 30)).unwrap(),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn local_date_decides_membership_not_utc() {
        // 2012-11-01 02:00 UTC at -300 minutes is still 2012-10-31 locally.
        let venues = "v1\t0\t0\tA\n";
        let checkins = "u1\tv1\t1351735200\t-300\n";
        let corpus = corpus_from(checkins, venues);
        let s = deduplicate(&corpus);
        let split = temporal_split(
            &s,
            DateRange::new(date(2012, 5, 1), date(2012, 10, 31)).unwrap(),
            DateRange::new(date(2012, 11, 1), date(2012, 11, 30)).unwrap(),
        )
        .unwrap();
        assert_eq!(split.train.len(), 1);
        assert_eq!(split.test.len(), 0);
    }

    #[test]
    fn partition_maps_each_interaction_to_its_city() {
        let venues = "v1\t0\t0\tA\nv2\t0\t1\tB\n";
        let corpus = corpus_from("u1\tv1\t100\t0\nu1\tv2\t200\t0\n", venues);
        let s = deduplicate(&corpus);
        let parts = partition_by_city(&s, &corpus.venue_table).unwrap();
        assert_eq!(parts.len(), 2);
        let total: usize = parts.values().map(|p| p.len()).sum();
        assert_eq!(total, s.len());
        assert_eq!(parts[&CityId(0)].len(), 1);
        assert_eq!(parts[&CityId(1)].len(), 1);
    }

    #[test]
    fn single_city_partition_equals_input() {
        let venues = "v1\t0\t0\tA\nv2\t0\t1\tA\n";
        let corpus = corpus_from("u1\tv1\t100\t0\nu2\tv2\t200\t0\n", venues);
        let s = deduplicate(&corpus);
        let parts = partition_by_city(&s, &corpus.venue_table).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&CityId(0)].len(), s.len());
    }

    #[test]
    fn stats_ratios_follow_counts() {
        let s = set(&[(1, 1, 0), (1, 2, 0), (2, 2, 0), (2, 3, 0)]);
        let stats = corpus_stats(&s);
        assert_eq!(stats.users, 2);
        assert_eq!(stats.items, 3);
        assert_eq!(stats.checkins, 4);
        assert!((stats.density - 4.0 / 6.0).abs() < 1e-12);
        assert!((stats.checkins_per_user - 2.0).abs() < 1e-12);
        assert!((stats.checkins_per_item - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stats_of_empty_set_are_zero() {
        let stats = corpus_stats(&InteractionSet::empty());
        assert_eq!(stats.users, 0);
        assert_eq!(stats.density, 0.0);
        assert_eq!(stats.checkins_per_user, 0.0);
    }
}
