//! Result rendering: the metrics CSV, single- and cross-domain tables
//! (machine CSV plus aligned text), and the overlap report.
//!
//! Metric CSVs carry full double precision; rendered tables round to three
//! decimals, and relative improvements are always computed from the
//! unrounded values.

use std::collections::BTreeMap;
use std::fs;

use cityrec_core::crossdomain::Strategy;
use cityrec_core::error::{Error, Result};
use cityrec_core::evaluation::delta_percent;

use crate::config::ExperimentConfig;
use crate::pipeline::{write_atomic, EvalRow};

/// Quote a CSV field when it contains a delimiter, quote, or newline.
/// City names come from the data, so they get the escape treatment;
/// every other column is controlled vocabulary.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

/// CSV schema: city, strategy, recommender, metric, cutoff, value,
/// evaluated_users, abstained_users.
pub fn metrics_csv(rows: &[EvalRow]) -> String {
    let mut out = String::from(
        "city,strategy,recommender,metric,cutoff,value,evaluated_users,abstained_users\n",
    );
    let mut sorted: Vec<&EvalRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.city, a.strategy.to_string(), &a.recommender).cmp(&(
            &b.city,
            b.strategy.to_string(),
            &b.recommender,
        ))
    });
    for row in sorted {
        let r = &row.report;
        let metrics = [
            ("ndcg", r.ndcg),
            ("precision", r.precision),
            ("recall", r.recall),
            ("ndcg_all", r.ndcg_all),
            ("precision_all", r.precision_all),
            ("recall_all", r.recall_all),
            ("coverage", r.coverage()),
        ];
        for (name, value) in metrics {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_field(&row.city),
                row.strategy,
                row.recommender,
                name,
                r.cutoff,
                value,
                r.evaluated_users,
                r.abstained_users
            ));
        }
    }
    out
}

/// (city, strategy, recommender) -> ndcg, parsed back from the CSV.
type MetricKey = (String, String, String);

pub fn read_metrics_csv(text: &str) -> Result<BTreeMap<MetricKey, f64>> {
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let fields = split_csv_line(line);
        if fields.len() != 8 {
            return Err(Error::Data(format!(
                "metrics.csv line {}: expected 8 fields",
                idx + 1
            )));
        }
        if fields[3] != "ndcg" {
            continue;
        }
        let value: f64 = fields[5]
            .parse()
            .map_err(|_| Error::Data(format!("metrics.csv line {}: bad value", idx + 1)))?;
        map.insert(
            (fields[0].clone(), fields[1].clone(), fields[2].clone()),
            value,
        );
    }
    Ok(map)
}

fn cities_of(metrics: &BTreeMap<MetricKey, f64>) -> Vec<String> {
    let mut cities: Vec<String> = metrics.keys().map(|(c, _, _)| c.clone()).collect();
    cities.dedup();
    cities
}

fn recommenders_of(metrics: &BTreeMap<MetricKey, f64>) -> Vec<String> {
    // canonical column order, restricted to what is present
    let present: Vec<String> = metrics.keys().map(|(_, _, r)| r.clone()).collect();
    ["rnd", "pop", "avgdis", "pgn", "ub", "ib", "hkv"]
        .iter()
        .filter(|r| present.iter().any(|p| p == *r))
        .map(|r| (*r).to_owned())
        .collect()
}

fn fmt3(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.3}"),
        None => "-".into(),
    }
}

/// Single-domain table: one row per city, one column per recommender; the
/// best value per city is marked with `*`.
pub fn single_domain_table(metrics: &BTreeMap<MetricKey, f64>) -> (String, String) {
    let cities = cities_of(metrics);
    let recs = recommenders_of(metrics);

    let mut csv = String::from("city,recommender,ndcg,best\n");
    let mut grid: Vec<Vec<String>> = Vec::new();
    for city in &cities {
        let values: Vec<Option<f64>> = recs
            .iter()
            .map(|r| {
                metrics
                    .get(&(city.clone(), "single".into(), r.clone()))
                    .copied()
            })
            .collect();
        let best = values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)));
        let mut row = vec![city.clone()];
        for (i, v) in values.iter().enumerate() {
            let marker = if best.map(|(bi, _)| bi) == Some(i) {
                "*"
            } else {
                ""
            };
            row.push(format!("{}{}", fmt3(*v), marker));
            csv.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(city),
                recs[i],
                v.map(|v| v.to_string()).unwrap_or_default(),
                if best.map(|(bi, _)| bi) == Some(i) {
                    1
                } else {
                    0
                }
            ));
        }
        grid.push(row);
    }

    let mut header = vec!["city".to_owned()];
    header.extend(recs.iter().cloned());
    (csv, render_grid(&header, &grid))
}

/// Cross-domain table: per city and cross-domain strategy, a value row and
/// a relative-improvement row. `*` marks the best value in the row, `^`
/// and `v` the largest positive and largest negative improvement.
pub fn cross_domain_table(metrics: &BTreeMap<MetricKey, f64>) -> (String, String) {
    let cities = cities_of(metrics);
    let recs = recommenders_of(metrics);
    let strategies: Vec<String> = {
        let mut s: Vec<String> = metrics
            .keys()
            .map(|(_, s, _)| s.clone())
            .filter(|s| s != "single")
            .collect();
        s.sort();
        s.dedup();
        s
    };

    let mut csv =
        String::from("city,strategy,recommender,ndcg,delta_pct,best,delta_best,delta_worst\n");
    let mut grid: Vec<Vec<String>> = Vec::new();

    for city in &cities {
        for strategy in &strategies {
            let values: Vec<Option<f64>> = recs
                .iter()
                .map(|r| {
                    metrics
                        .get(&(city.clone(), strategy.clone(), r.clone()))
                        .copied()
                })
                .collect();
            if values.iter().all(Option::is_none) {
                continue;
            }
            let deltas: Vec<Option<f64>> = recs
                .iter()
                .zip(&values)
                .map(|(r, v)| {
                    let sd = metrics.get(&(city.clone(), "single".into(), r.clone()))?;
                    delta_percent((*v)?, *sd)
                })
                .collect();

            let best = values
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (i, v)))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)));
            let delta_best = deltas
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (i, d)))
                .filter(|&(_, d)| d > 0.0)
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)));
            let delta_worst = deltas
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (i, d)))
                .filter(|&(_, d)| d < 0.0)
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

            let mut value_row = vec![city.clone(), strategy.clone()];
            let mut delta_row = vec![String::new(), "delta%".to_owned()];
            for i in 0..recs.len() {
                let best_marker = if best.map(|(bi, _)| bi) == Some(i) {
                    "*"
                } else {
                    ""
                };
                value_row.push(format!("{}{}", fmt3(values[i]), best_marker));
                let d = deltas[i];
                let d_str = match d {
                    Some(d) => format!("{d:+.1}"),
                    None => "-".into(),
                };
                let marker = if delta_best.map(|(bi, _)| bi) == Some(i) {
                    "^"
                } else if delta_worst.map(|(wi, _)| wi) == Some(i) {
                    "v"
                } else {
                    ""
                };
                delta_row.push(format!("{d_str}{marker}"));

                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    csv_field(city),
                    strategy,
                    recs[i],
                    values[i].map(|v| v.to_string()).unwrap_or_default(),
                    d.map(|d| d.to_string()).unwrap_or_default(),
                    (best.map(|(bi, _)| bi) == Some(i)) as u8,
                    (delta_best.map(|(bi, _)| bi) == Some(i)) as u8,
                    (delta_worst.map(|(wi, _)| wi) == Some(i)) as u8,
                ));
            }
            grid.push(value_row);
            grid.push(delta_row);
        }
    }

    let mut header = vec!["city".to_owned(), "strategy".to_owned()];
    header.extend(recs.iter().cloned());
    (csv, render_grid(&header, &grid))
}

fn render_grid(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &[String]| {
        let line: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    emit(&mut out, header);
    for row in rows {
        emit(&mut out, row);
    }
    out
}

/// Overlap report: one row per (variant, strategy), one column per city.
pub fn overlap_table(rows: &[(String, Strategy, String, f64)]) -> String {
    let mut cities: Vec<String> = rows.iter().map(|(_, _, c, _)| c.clone()).collect();
    cities.sort();
    cities.dedup();

    let mut keys: Vec<(String, String)> = rows
        .iter()
        .map(|(v, s, _, _)| (v.clone(), s.to_string()))
        .collect();
    keys.dedup();

    let map: BTreeMap<(String, String, String), f64> = rows
        .iter()
        .map(|(v, s, c, x)| ((v.clone(), s.to_string(), c.clone()), *x))
        .collect();

    let mut out = String::from("variant\tstrategy");
    for c in &cities {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for (variant, strategy) in keys {
        out.push_str(&format!("{variant}\t{strategy}"));
        for c in &cities {
            let v = map.get(&(variant.clone(), strategy.clone(), c.clone()));
            match v {
                Some(v) => out.push_str(&format!("\t{:.4}%", v * 100.0)),
                None => out.push_str("\t-"),
            }
        }
        out.push('\n');
    }
    out
}

/// Render both tables from `metrics.csv` in the output directory.
pub fn write_tables(config: &ExperimentConfig) -> Result<Vec<String>> {
    let path = config.out.join("metrics.csv");
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let metrics = read_metrics_csv(&text)?;

    let mut artifacts = Vec::new();
    let (csv, txt) = single_domain_table(&metrics);
    write_atomic(&config.out.join("table_single.csv"), csv.as_bytes())?;
    write_atomic(&config.out.join("table_single.txt"), txt.as_bytes())?;
    artifacts.push("table_single.csv".to_owned());
    artifacts.push("table_single.txt".to_owned());

    let has_cross = metrics.keys().any(|(_, s, _)| s != "single");
    if has_cross {
        let (csv, txt) = cross_domain_table(&metrics);
        write_atomic(&config.out.join("table_cross.csv"), csv.as_bytes())?;
        write_atomic(&config.out.join("table_cross.txt"), txt.as_bytes())?;
        artifacts.push("table_cross.csv".to_owned());
        artifacts.push("table_cross.txt".to_owned());
    }
    Ok(artifacts)
}
