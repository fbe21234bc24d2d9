//! Raw file parsing and the write-back formats.
//!
//! Check-in file: UTF-8, tab-separated, one event per line:
//! `user_id \t venue_id \t utc_time \t tz_offset_min`, where `utc_time` is
//! either integer epoch seconds or a literal like
//! `Tue Apr 03 18:00:09 +0000 2012`. Lines starting with `#` are ignored.
//!
//! Venue file: `venue_id \t latitude \t longitude \t city_id`, optional
//! trailing fields ignored.
//!
//! Malformed lines are counted and reported, never silently dropped and
//! never fatal: multi-million-line logs always contain noise.

use std::io::{BufRead, Write};

use chrono::DateTime;

use crate::error::Result;
use crate::geo::GeoPoint;
use crate::ids::{CityId, IdMap, UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::preprocess::CorpusStats;
use crate::types::{CheckIn, VenueRecord, VenueTable, MAX_TZ_OFFSET_MIN, MIN_TZ_OFFSET_MIN};

/// Accepted epoch-second window for check-in times (year 1970 to 9999).
const MAX_UTC_SECS: i64 = 253_402_300_799;

/// Parsed corpus: events plus the identifier tables behind the handles.
#[derive(Debug, Default)]
pub struct RawCorpus {
    pub users: IdMap,
    pub venues: IdMap,
    pub cities: IdMap,
    pub checkins: Vec<CheckIn>,
    pub venue_table: VenueTable,
}

/// Which input file a rejected line came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSource {
    CheckIns,
    Venues,
}

#[derive(Debug, Clone)]
pub struct RejectedLine {
    pub source: LineSource,
    pub line_number: usize,
    pub reason: &'static str,
    pub detail: String,
}

pub const REASON_BAD_FIELD: &str = "bad field";
pub const REASON_UNKNOWN_VENUE: &str = "unknown venue";
pub const REASON_DUPLICATE_VENUE: &str = "duplicate venue";

#[derive(Debug, Default)]
pub struct ParseReport {
    pub checkin_lines: usize,
    pub venue_lines: usize,
    pub accepted_checkins: usize,
    pub accepted_venues: usize,
    pub rejected: Vec<RejectedLine>,
}

impl ParseReport {
    pub fn rejected_count(&self) -> usize {
        self.rejected.len()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "checkin_lines={}", self.checkin_lines)?;
        writeln!(w, "venue_lines={}", self.venue_lines)?;
        writeln!(w, "accepted_checkins={}", self.accepted_checkins)?;
        writeln!(w, "accepted_venues={}", self.accepted_venues)?;
        writeln!(w, "rejected={}", self.rejected.len())?;
        for r in &self.rejected {
            let src = match r.source {
                LineSource::CheckIns => "checkins",
                LineSource::Venues => "venues",
            };
            writeln!(
                w,
                "reject\t{}\t{}\t{}\t{}",
                src, r.line_number, r.reason, r.detail
            )?;
        }
        Ok(())
    }
}

/// Parse a check-in stream against a venue stream.
///
/// Venues are interned first so that check-ins referencing unknown venues
/// can be rejected with a reason instead of inventing records.
pub fn parse_corpus<C: BufRead, V: BufRead>(
    checkin_stream: C,
    venue_stream: V,
) -> Result<(RawCorpus, ParseReport)> {
    let mut corpus = RawCorpus::default();
    let mut report = ParseReport::default();
    let mut records: Vec<VenueRecord> = Vec::new();

    for (idx, line) in venue_stream.lines().enumerate() {
        let line = line?;
        let line_number = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        report.venue_lines += 1;
        match parse_venue_line(&line, &mut corpus) {
            Ok(record) => {
                records.push(record);
                report.accepted_venues += 1;
            }
            Err((reason, detail)) => report.rejected.push(RejectedLine {
                source: LineSource::Venues,
                line_number,
                reason,
                detail,
            }),
        }
    }
    corpus.venue_table = VenueTable::new(records);

    for (idx, line) in checkin_stream.lines().enumerate() {
        let line = line?;
        let line_number = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        report.checkin_lines += 1;
        match parse_checkin_line(&line, &mut corpus) {
            Ok(checkin) => {
                corpus.checkins.push(checkin);
                report.accepted_checkins += 1;
            }
            Err((reason, detail)) => report.rejected.push(RejectedLine {
                source: LineSource::CheckIns,
                line_number,
                reason,
                detail,
            }),
        }
    }

    Ok((corpus, report))
}

type LineError = (&'static str, String);

fn parse_venue_line(
    line: &str,
    corpus: &mut RawCorpus,
) -> std::result::Result<VenueRecord, LineError> {
    let mut fields = line.split('\t');
    let (Some(venue), Some(lat), Some(lon), Some(city)) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err((REASON_BAD_FIELD, format!("expected 4+ columns: {line:?}")));
    };

    let lat: f64 = lat
        .trim()
        .parse()
        .map_err(|_| (REASON_BAD_FIELD, format!("latitude {lat:?}")))?;
    let lon: f64 = lon
        .trim()
        .parse()
        .map_err(|_| (REASON_BAD_FIELD, format!("longitude {lon:?}")))?;
    let location = GeoPoint::new(lat, lon).map_err(|e| (REASON_BAD_FIELD, e.to_string()))?;

    if corpus.venues.get(venue).is_some() {
        return Err((REASON_DUPLICATE_VENUE, venue.to_owned()));
    }
    let venue = VenueId(corpus.venues.intern(venue));
    let city = CityId(corpus.cities.intern(city.trim()));
    Ok(VenueRecord {
        venue,
        location,
        city,
    })
}

fn parse_checkin_line(
    line: &str,
    corpus: &mut RawCorpus,
) -> std::result::Result<CheckIn, LineError> {
    let mut fields = line.split('\t');
    let (Some(user), Some(venue), Some(time), Some(offset)) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err((REASON_BAD_FIELD, format!("expected 4 columns: {line:?}")));
    };

    let Some(venue_id) = corpus.venues.get(venue) else {
        return Err((REASON_UNKNOWN_VENUE, venue.to_owned()));
    };

    let utc_time =
        parse_time(time.trim()).ok_or_else(|| (REASON_BAD_FIELD, format!("time {time:?}")))?;
    if !(0..=MAX_UTC_SECS).contains(&utc_time) {
        return Err((
            REASON_BAD_FIELD,
            format!("time {utc_time} outside epoch window"),
        ));
    }

    let tz_offset_min: i32 = offset
        .trim()
        .parse()
        .map_err(|_| (REASON_BAD_FIELD, format!("offset {offset:?}")))?;
    if !(MIN_TZ_OFFSET_MIN..=MAX_TZ_OFFSET_MIN).contains(&tz_offset_min) {
        return Err((
            REASON_BAD_FIELD,
            format!("offset {tz_offset_min} out of range"),
        ));
    }

    let user = UserId(corpus.users.intern(user));
    Ok(CheckIn {
        user,
        venue: VenueId(venue_id),
        utc_time,
        tz_offset_min,
    })
}

/// Epoch seconds, either as a plain integer or in the log's literal form
/// `Tue Apr 03 18:00:09 +0000 2012`.
fn parse_time(field: &str) -> Option<i64> {
    if let Ok(secs) = field.parse::<i64>() {
        return Some(secs);
    }
    DateTime::parse_from_str(field, "%a %b %d %H:%M:%S %z %Y")
        .ok()
        .map(|dt| dt.timestamp())
}

/// Write an interaction set back in the check-in file format, restoring the
/// original string identifiers. Timestamps are already local, so they are
/// emitted with a zero offset; re-parsing yields the same local times.
pub fn write_interactions<W: Write>(
    mut w: W,
    set: &InteractionSet,
    users: &IdMap,
    venues: &IdMap,
) -> Result<()> {
    for (u, v, t) in set.iter() {
        writeln!(w, "{}\t{}\t{}\t0", users.name(u.0), venues.name(v.0), t)?;
    }
    Ok(())
}

/// Stats file: `CorpusStats` as key=value lines.
pub fn write_stats<W: Write>(mut w: W, stats: &CorpusStats) -> Result<()> {
    writeln!(w, "users={}", stats.users)?;
    writeln!(w, "items={}", stats.items)?;
    writeln!(w, "checkins={}", stats.checkins)?;
    writeln!(w, "density={}", stats.density)?;
    writeln!(w, "checkins_per_user={}", stats.checkins_per_user)?;
    writeln!(w, "checkins_per_item={}", stats.checkins_per_item)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const VENUES: &str = "v1\t40.0\t29.0\tcityA\nv2\t40.1\t29.1\tcityA\n";

    fn parse(checkins: &str, venues: &str) -> (RawCorpus, ParseReport) {
        parse_corpus(checkins.as_bytes(), venues.as_bytes()).unwrap()
    }

    #[test]
    fn clean_input_has_no_rejects() {
        let checkins = "u1\tv1\t1000\t0\nu1\tv2\t2000\t60\nu2\tv1\t3000\t-120\n";
        let (corpus, report) = parse(checkins, VENUES);
        assert_eq!(corpus.checkins.len(), 3);
        assert_eq!(report.rejected_count(), 0);
        assert_eq!(corpus.users.len(), 2);
        assert_eq!(corpus.venues.len(), 2);
    }

    #[test]
    fn unknown_venue_is_rejected_with_reason() {
        let (corpus, report) = parse("u1\tv9\t1000\t0\n", VENUES);
        assert!(corpus.checkins.is_empty());
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].reason, REASON_UNKNOWN_VENUE);
        // the offending user is not interned
        assert_eq!(corpus.users.len(), 0);
    }

    #[test]
    fn bad_offset_is_rejected_with_reason() {
        let (_, report) = parse("u1\tv1\t1000\tabc\n", VENUES);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].reason, REASON_BAD_FIELD);
    }

    #[test]
    fn offset_out_of_range_is_bad_field() {
        let (_, report) = parse("u1\tv1\t1000\t900\n", VENUES);
        assert_eq!(report.rejected[0].reason, REASON_BAD_FIELD);
    }

    #[test]
    fn literal_time_format_is_accepted() {
        let (corpus, report) = parse("u1\tv1\tTue Apr 03 18:00:09 +0000 2012\t120\n", VENUES);
        assert_eq!(report.rejected_count(), 0);
        assert_eq!(corpus.checkins[0].utc_time, 1_333_476_009);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let (corpus, report) = parse("# header\n\nu1\tv1\t1000\t0\n", VENUES);
        assert_eq!(corpus.checkins.len(), 1);
        assert_eq!(report.checkin_lines, 1);
    }

    #[test]
    fn duplicate_venue_line_is_rejected() {
        let venues = "v1\t40.0\t29.0\tcityA\nv1\t41.0\t29.0\tcityB\n";
        let (corpus, report) = parse("", venues);
        assert_eq!(corpus.venue_table.len(), 1);
        assert_eq!(report.rejected[0].reason, REASON_DUPLICATE_VENUE);
        // first record wins
        assert_eq!(
            corpus
                .cities
                .name(corpus.venue_table.get(VenueId(0)).unwrap().city.0),
            "cityA"
        );
    }

    #[test]
    fn venue_with_trailing_fields_is_accepted() {
        let venues = "v1\t40.0\t29.0\tcityA\textra\tmore\n";
        let (corpus, report) = parse("", venues);
        assert_eq!(report.rejected_count(), 0);
        assert_eq!(corpus.venue_table.len(), 1);
    }

    #[test]
    fn unreadable_stream_is_an_io_error() {
        struct Failing;
        impl std::io::Read for Failing {
            fn read(&mut self, _: &mut [u8]) -> std::io::Result<usize> {
                Err(std::io::Error::other("stream broke"))
            }
        }
        let r = parse_corpus(std::io::BufReader::new(Failing), VENUES.as_bytes());
        assert!(matches!(r, Err(crate::error::Error::Io(_))));
    }

    #[test]
    fn write_back_round_trips_local_times() {
        let (corpus, _) = parse("u1\tv1\t1000\t60\nu2\tv2\t5000\t-60\n", VENUES);
        let set = crate::preprocess::deduplicate(&corpus);
        let mut buf = Vec::new();
        write_interactions(&mut buf, &set, &corpus.users, &corpus.venues).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "u1\tv1\t4600\t0\nu2\tv2\t1400\t0\n");
    }
}
