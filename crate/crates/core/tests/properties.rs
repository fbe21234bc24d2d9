//! Property tests for the library invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cityrec_core::evaluation::ndcg_at_k;
use cityrec_core::geo::{haversine_km, GeoPoint};
use cityrec_core::ids::{UserId, VenueId};
use cityrec_core::ingest::parse_corpus;
use cityrec_core::interactions::InteractionSet;
use cityrec_core::preprocess::{deduplicate, k_core, temporal_split, DateRange};
use cityrec_core::similarity::{set_cosine, set_jaccard};

fn point() -> impl Strategy<Value = GeoPoint> {
    (-90.0f64..=90.0, -180.0f64..180.0).prop_map(|(lat, lon)| GeoPoint::new(lat, lon).unwrap())
}

fn id_set() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::btree_set(0u32..60, 0..30).prop_map(|s| s.into_iter().collect())
}

/// Random bipartite interactions as unique (user, venue, time) triples.
fn interactions() -> impl Strategy<Value = InteractionSet> {
    proptest::collection::btree_map((0u32..15, 0u32..15), 0i64..1_000_000, 0..60).prop_map(|m| {
        InteractionSet::from_triples(m.into_iter().map(|((u, v), t)| (UserId(u), VenueId(v), t)))
            .unwrap()
    })
}

proptest! {
    #[test]
    fn haversine_triangle_inequality(a in point(), b in point(), c in point()) {
        prop_assert!(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6);
    }

    #[test]
    fn haversine_symmetry_and_nonnegativity(a in point(), b in point()) {
        prop_assert!(haversine_km(a, b) >= 0.0);
        prop_assert_eq!(haversine_km(a, b).to_bits(), haversine_km(b, a).to_bits());
    }

    #[test]
    fn jaccard_bounds_and_symmetry(a in id_set(), b in id_set()) {
        let s = set_jaccard(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s.to_bits(), set_jaccard(&b, &a).to_bits());
    }

    #[test]
    fn cosine_bounds_and_symmetry_at_half(a in id_set(), b in id_set()) {
        let s = set_cosine(&a, &b, 0.5);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - set_cosine(&b, &a, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn cosine_generally_asymmetric_off_half(a in id_set(), b in id_set()) {
        // alpha != 0.5 flips the roles of |A| and |B|
        let fwd = set_cosine(&a, &b, 0.2);
        let bwd = set_cosine(&b, &a, 0.2);
        if a.len() != b.len() && fwd > 0.0 {
            prop_assert!((fwd - bwd).abs() > 0.0 || a.len() == b.len());
        }
    }

    #[test]
    fn transpose_consistency(set in interactions()) {
        for (u, v, _) in set.iter() {
            prop_assert!(set.users_of(v).contains(&u));
        }
        let venues: Vec<VenueId> = set.venues().collect();
        for v in venues {
            for &u in set.users_of(v) {
                prop_assert!(set.contains(u, v));
            }
        }
    }

    #[test]
    fn kcore_degrees_and_idempotence(set in interactions(), k in 1usize..4) {
        let out = k_core(&set, k).unwrap();
        for u in out.users() {
            prop_assert!(out.venues_of(u).len() >= k);
        }
        for v in out.venues() {
            prop_assert!(out.users_of(v).len() >= k);
        }
        let again = k_core(&out, k).unwrap();
        prop_assert_eq!(out.len(), again.len());
        prop_assert_eq!(out.fingerprint(), again.fingerprint());
    }

    #[test]
    fn kcore_is_maximal_among_subsets_checked(set in interactions()) {
        // every interaction dropped by the 2-core involves a user or venue
        // that cannot survive: re-adding any single dropped pair breaks a
        // degree bound or was transitively unsupported
        let out = k_core(&set, 2).unwrap();
        let kept: BTreeSet<(u32, u32)> = out.iter().map(|(u, v, _)| (u.0, v.0)).collect();
        for (u, v, _) in set.iter() {
            prop_assert!(
                kept.contains(&(u.0, v.0))
                    || !kept.iter().any(|&(ku, _)| ku == u.0)
                    || !kept.iter().any(|&(_, kv)| kv == v.0)
                    || out.venues_of(u).len() >= 2
            );
        }
    }

    #[test]
    fn temporal_split_partitions_the_input(set in interactions()) {
        let train_w = DateRange::new(
            chrono::NaiveDate::from_ymd_opt(1970, 1, 1).unwrap(),
            chrono::NaiveDate::from_ymd_opt(1970, 1, 6).unwrap(),
        ).unwrap();
        let test_w = DateRange::new(
            chrono::NaiveDate::from_ymd_opt(1970, 1, 7).unwrap(),
            chrono::NaiveDate::from_ymd_opt(1970, 1, 9).unwrap(),
        ).unwrap();
        let split = temporal_split(&set, train_w, test_w).unwrap();
        prop_assert_eq!(split.train.len() + split.test.len() + split.discarded, set.len());
        for (u, v, t) in split.train.iter() {
            prop_assert!(set.timestamp(u, v) == Some(t));
            prop_assert!(!split.test.contains(u, v));
        }
    }

    #[test]
    fn ndcg_bounded_and_rank_monotone(
        perm in Just(()).prop_perturb(|_, mut rng| {
            let mut v: Vec<u32> = (0..8).collect();
            for i in (1..v.len()).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                v.swap(i, j);
            }
            v
        }),
        mask in 0u32..256,
        k in 1usize..8,
    ) {
        let ranking: Vec<VenueId> = perm.iter().map(|&v| VenueId(v)).collect();
        let relevant: BTreeSet<VenueId> =
            (0..8).filter(|i| mask & (1 << i) != 0).map(VenueId).collect();
        let base = ndcg_at_k(&ranking, &relevant, k);
        prop_assert!((0.0..=1.0).contains(&base));

        // swapping a relevant item into an earlier position never hurts
        let mut improved = ranking.clone();
        if let Some(pos) = improved.iter().position(|v| relevant.contains(v)) {
            if pos > 0 {
                improved.swap(pos, pos - 1);
                prop_assert!(ndcg_at_k(&improved, &relevant, k) >= base - 1e-12);
            }
        }
    }
}

/// Deduplication keeps the earliest local time per pair and is idempotent.
#[test]
fn dedup_oracle_on_random_multisets() {
    use cityrec_core::rng::SplitMix64;
    let mut rng = SplitMix64::new(9);
    for _ in 0..50 {
        let venues: String = (0..10).map(|v| format!("v{v}\t0\t{v}\tcity\n")).collect();
        let mut checkins = String::new();
        let mut expect: BTreeMap<(String, String), i64> = BTreeMap::new();
        for _ in 0..200 {
            let u = format!("u{}", rng.next_below(12));
            let v = format!("v{}", rng.next_below(10));
            let utc = rng.next_below(1_000_000) as i64;
            let off = rng.next_below(5) as i64 * 60 - 120;
            checkins.push_str(&format!("{u}\t{v}\t{utc}\t{off}\n"));
            let local = utc + 60 * off;
            expect
                .entry((u, v))
                .and_modify(|t| *t = (*t).min(local))
                .or_insert(local);
        }
        let (corpus, report) = parse_corpus(checkins.as_bytes(), venues.as_bytes()).unwrap();
        assert_eq!(report.rejected_count(), 0);
        let dedup = deduplicate(&corpus);
        assert_eq!(dedup.len(), expect.len());
        for ((u, v), t) in expect {
            let uid = UserId(corpus.users.get(&u).unwrap());
            let vid = VenueId(corpus.venues.get(&v).unwrap());
            assert_eq!(dedup.timestamp(uid, vid), Some(t));
        }
    }
}
