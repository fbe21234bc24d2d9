//! Deterministic synthetic corpus generator.
//!
//! Produces check-in and venue files in the ingestion format for a small
//! multi-city world with planted structure: venues cluster into
//! geographic "communities" inside each city, users favor one community,
//! and a configurable number of users are active in more than one city.
//! Everything derives from a single seed, so the same spec and seed
//! always produce byte-identical files.

use chrono::NaiveDate;

use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct FixtureCity {
    pub name: &'static str,
    pub center: (f64, f64),
    pub tz_offset_min: i32,
    pub communities: usize,
    pub venues_per_community: usize,
    /// Users active only in this city.
    pub residents: usize,
    /// Inclusive range of distinct venues visited in the training window.
    pub train_visits: (usize, usize),
    /// Inclusive range of distinct venues visited in the test window.
    pub test_visits: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct FixtureSpec {
    pub cities: Vec<FixtureCity>,
    /// (city a, city b, count): users active in both cities.
    pub shared_users: Vec<(usize, usize, usize)>,
    pub train_days: (NaiveDate, NaiveDate),
    pub test_days: (NaiveDate, NaiveDate),
    /// Probability of re-visiting an already visited venue (exercises
    /// deduplication).
    pub repeat_rate: f64,
    /// Probability that a visit stays inside the user's home community.
    pub community_affinity: f64,
}

impl FixtureSpec {
    /// The three-city demo corpus: two nearby cities with substantial user
    /// overlap and one distant, larger city.
    pub fn three_city() -> Self {
        Self {
            cities: vec![
                FixtureCity {
                    name: "arden",
                    center: (40.00, 29.00),
                    tz_offset_min: 180,
                    communities: 4,
                    venues_per_community: 12,
                    residents: 140,
                    train_visits: (2, 4),
                    test_visits: (1, 3),
                },
                FixtureCity {
                    name: "birkfield",
                    center: (40.40, 29.55),
                    tz_offset_min: 180,
                    communities: 4,
                    venues_per_community: 12,
                    residents: 140,
                    train_visits: (5, 9),
                    test_visits: (1, 3),
                },
                FixtureCity {
                    name: "calvera",
                    center: (-34.60, -58.40),
                    tz_offset_min: -180,
                    communities: 4,
                    venues_per_community: 12,
                    residents: 400,
                    train_visits: (4, 8),
                    test_visits: (1, 3),
                },
            ],
            shared_users: vec![(0, 1, 120), (0, 2, 2)],
            train_days: (ymd(2012, 5, 1), ymd(2012, 10, 31)),
            test_days: (ymd(2012, 11, 1), ymd(2012, 11, 30)),
            repeat_rate: 0.15,
            community_affinity: 0.85,
        }
    }

    /// Like `three_city` but with zero users shared with the distant city,
    /// for directional experiments where only proximity-based sharing may
    /// exist.
    pub fn planted() -> Self {
        let mut spec = Self::three_city();
        spec.shared_users = vec![(0, 1, 120)];
        spec
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

struct Membership {
    user: String,
    city: usize,
    community: usize,
}

/// Generate (check-in file, venue file) contents for a spec and seed.
pub fn generate(spec: &FixtureSpec, seed: u64) -> (String, String) {
    let mut rng = SplitMix64::new(seed);

    // Venue layout: communities sit on a small ring around the city
    // center, venues scatter tightly around their community.
    let mut venues_tsv = String::new();
    let mut venue_names: Vec<Vec<Vec<String>>> = Vec::new(); // [city][community][venue]
    for (ci, city) in spec.cities.iter().enumerate() {
        let mut per_community = Vec::new();
        for g in 0..city.communities {
            let angle = g as f64 / city.communities as f64 * std::f64::consts::TAU;
            let (clat, clon) = (
                city.center.0 + 0.060 * angle.sin(),
                city.center.1 + 0.060 * angle.cos(),
            );
            let mut names = Vec::new();
            for v in 0..city.venues_per_community {
                let name = format!("v{}_{}_{}", ci, g, v);
                let lat = clat + (rng.next_f64() - 0.5) * 0.008;
                let lon = clon + (rng.next_f64() - 0.5) * 0.008;
                venues_tsv.push_str(&format!(
                    "{}\t{:.6}\t{:.6}\t{}\n",
                    name, lat, lon, city.name
                ));
                names.push(name);
            }
            per_community.push(names);
        }
        venue_names.push(per_community);
    }

    // User memberships: residents first, then shared users.
    let mut memberships: Vec<Membership> = Vec::new();
    for (ci, city) in spec.cities.iter().enumerate() {
        for r in 0..city.residents {
            memberships.push(Membership {
                user: format!("u{}_{}", ci, r),
                city: ci,
                community: r % city.communities,
            });
        }
    }
    for (pair_idx, &(a, b, count)) in spec.shared_users.iter().enumerate() {
        for s in 0..count {
            let user = format!("s{}_{}", pair_idx, s);
            let community = s % spec.cities[a].communities.min(spec.cities[b].communities);
            memberships.push(Membership {
                user: user.clone(),
                city: a,
                community,
            });
            memberships.push(Membership {
                user,
                city: b,
                community,
            });
        }
    }

    let train_span = (spec.train_days.1 - spec.train_days.0).num_days() as u64 + 1;
    let test_span = (spec.test_days.1 - spec.test_days.0).num_days() as u64 + 1;

    let mut checkins_tsv = String::new();
    for m in &memberships {
        let city = &spec.cities[m.city];
        let pools = &venue_names[m.city];

        let pick_venue = |rng: &mut SplitMix64, exclude: &[usize]| -> usize {
            // flat index over the city's venues, biased toward the user's
            // community and toward low venue indices (popularity skew)
            loop {
                let (g, v) = if rng.next_f64() < spec.community_affinity {
                    let r = rng.next_f64();
                    (
                        m.community,
                        ((r * r) * city.venues_per_community as f64) as usize,
                    )
                } else {
                    (
                        rng.next_below(city.communities as u64) as usize,
                        rng.next_below(city.venues_per_community as u64) as usize,
                    )
                };
                let flat = g * city.venues_per_community + v.min(city.venues_per_community - 1);
                if !exclude.contains(&flat) {
                    return flat;
                }
            }
        };

        let emit =
            |rng: &mut SplitMix64, out: &mut String, flat: usize, start: NaiveDate, span: u64| {
                let date = start + chrono::Days::new(rng.next_below(span));
                let secs_in_day = rng.next_below(86_400) as i64;
                let local = date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp() + secs_in_day;
                let utc = local - 60 * city.tz_offset_min as i64;
                let venue =
                    &pools[flat / city.venues_per_community][flat % city.venues_per_community];
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    m.user, venue, utc, city.tz_offset_min
                ));
            };

        // training visits: distinct venues, occasionally revisited
        let (lo, hi) = city.train_visits;
        let n_train = lo + rng.next_below((hi - lo + 1) as u64) as usize;
        let mut visited: Vec<usize> = Vec::with_capacity(n_train);
        for _ in 0..n_train {
            let flat = pick_venue(&mut rng, &visited);
            visited.push(flat);
            emit(
                &mut rng,
                &mut checkins_tsv,
                flat,
                spec.train_days.0,
                train_span,
            );
            if rng.next_f64() < spec.repeat_rate {
                emit(
                    &mut rng,
                    &mut checkins_tsv,
                    flat,
                    spec.train_days.0,
                    train_span,
                );
            }
        }

        // test visits: venues the user did not visit in training
        let (lo, hi) = city.test_visits;
        let n_test = lo + rng.next_below((hi - lo + 1) as u64) as usize;
        for _ in 0..n_test {
            let flat = pick_venue(&mut rng, &visited);
            visited.push(flat);
            emit(
                &mut rng,
                &mut checkins_tsv,
                flat,
                spec.test_days.0,
                test_span,
            );
        }
    }

    (checkins_tsv, venues_tsv)
}
