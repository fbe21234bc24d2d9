//! Experiment configuration: flat key=value file with one section per
//! recommender, validated before any computation runs.
//!
//! ```text
//! checkins   = data/checkins.tsv
//! venues     = data/venues.tsv
//! seed       = 42
//! kcore      = 2
//! cutoff     = 5
//! train_start = 2012-05-01
//! train_end   = 2012-10-31
//! test_start  = 2012-11-01
//! test_end    = 2012-11-30
//! strategies  = single,ncd:1,pcd:1
//!
//! [ub]
//! similarity = sj,sc
//! k          = 5,10,20
//! ```
//!
//! Unknown keys and sections are rejected. List-valued keys define grids
//! for `gridsearch`; `run` needs a single point per recommender, from a
//! singleton grid or from an optima file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use cityrec_core::crossdomain::Strategy;
use cityrec_core::error::{Error, Result};
use cityrec_core::preprocess::DateRange;
use cityrec_core::recommend::{FactorModelParams, KnnParams};
use cityrec_core::rng::fnv1a64;
use cityrec_core::similarity::SimilarityKind;

/// Grid (or fixed point) of a k-NN recommender.
#[derive(Debug, Clone)]
pub struct KnnGrid {
    pub similarities: Vec<SimilarityKind>,
    pub ks: Vec<usize>,
}

impl KnnGrid {
    fn table_defaults() -> Self {
        Self {
            similarities: vec![
                SimilarityKind::set_cosine_default(),
                SimilarityKind::SetJaccard,
            ],
            ks: (1..=20).map(|i| i * 5).collect(),
        }
    }

    pub fn points(&self) -> Vec<KnnParams> {
        let mut out = Vec::new();
        for &sim in &self.similarities {
            for &k in &self.ks {
                out.push(KnnParams { similarity: sim, k });
            }
        }
        out
    }
}

/// Grid (or fixed point) of the factorization recommender.
#[derive(Debug, Clone)]
pub struct FactorGrid {
    pub factors: Vec<usize>,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub iterations: usize,
}

impl FactorGrid {
    fn table_defaults() -> Self {
        Self {
            factors: vec![10, 50, 100],
            alphas: vec![0.1, 1.0, 10.0],
            lambdas: vec![0.1, 1.0, 10.0],
            iterations: 20,
        }
    }

    pub fn points(&self) -> Vec<FactorModelParams> {
        let mut out = Vec::new();
        for &f in &self.factors {
            for &a in &self.alphas {
                for &l in &self.lambdas {
                    out.push(FactorModelParams {
                        factors: f,
                        confidence_alpha: a,
                        lambda: l,
                        iterations: self.iterations,
                        early_stop: Some(1e-4),
                    });
                }
            }
        }
        out
    }
}

/// One roster member with its parameter grid.
#[derive(Debug, Clone)]
pub enum RecSpec {
    Rnd,
    Pop,
    AvgDis,
    Pgn,
    Ub(KnnGrid),
    Ib(KnnGrid),
    Hkv(FactorGrid),
}

impl RecSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RecSpec::Rnd => "rnd",
            RecSpec::Pop => "pop",
            RecSpec::AvgDis => "avgdis",
            RecSpec::Pgn => "pgn",
            RecSpec::Ub(_) => "ub",
            RecSpec::Ib(_) => "ib",
            RecSpec::Hkv(_) => "hkv",
        }
    }

    /// Number of grid points this roster member contributes.
    pub fn grid_size(&self) -> usize {
        match self {
            RecSpec::Rnd | RecSpec::Pop | RecSpec::AvgDis | RecSpec::Pgn => 1,
            RecSpec::Ub(g) | RecSpec::Ib(g) => g.points().len(),
            RecSpec::Hkv(g) => g.points().len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub checkins: PathBuf,
    pub venues: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub cutoff: usize,
    pub kcore: usize,
    pub train_window: DateRange,
    pub test_window: DateRange,
    /// City names to evaluate; empty = every city in the data.
    pub cities: Vec<String>,
    pub strategies: Vec<Strategy>,
    pub optima: Option<PathBuf>,
    pub roster: Vec<RecSpec>,
    /// FNV-1a over the canonicalized configuration.
    pub hash: u64,
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub cities: Option<Vec<String>>,
    pub strategies: Option<Vec<String>>,
}

pub fn parse_strategy(s: &str) -> Result<Strategy> {
    if s == "single" {
        return Ok(Strategy::SingleDomain);
    }
    if let Some(n) = s.strip_prefix("ncd:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Config(format!("bad strategy {s:?}")))?;
        return Ok(Strategy::NearestCd(n));
    }
    if let Some(n) = s.strip_prefix("pcd:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Config(format!("bad strategy {s:?}")))?;
        return Ok(Strategy::PopularCd(n));
    }
    Err(Error::Config(format!(
        "bad strategy {s:?}: expected single, ncd:N, or pcd:N"
    )))
}

struct RawSections {
    top: BTreeMap<String, String>,
    sections: Vec<(String, BTreeMap<String, String>)>,
}

fn split_sections(text: &str) -> Result<RawSections> {
    let mut top = BTreeMap::new();
    let mut sections: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_owned();
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(Error::Config(format!("duplicate section [{name}]")));
            }
            sections.push((name, BTreeMap::new()));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key = value, got {raw:?}",
                idx + 1
            )));
        };
        let key = key.trim().to_owned();
        let value = value.trim().to_owned();
        let target = match sections.last_mut() {
            Some((_, map)) => map,
            None => &mut top,
        };
        if target.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate key {key:?}")));
        }
    }
    Ok(RawSections { top, sections })
}

fn parse_list<T, F>(value: &str, what: &str, f: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).ok_or_else(|| Error::Config(format!("bad {what} value {s:?}"))))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("empty {what} list")));
    }
    Ok(items)
}

fn parse_date(value: &str, key: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| Error::Config(format!("bad date for {key}: {value:?}")))
}

fn knn_grid(map: &BTreeMap<String, String>, section: &str) -> Result<KnnGrid> {
    let defaults = KnnGrid::table_defaults();
    let alpha = match map.get("alpha") {
        None => 0.5,
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("[{section}] bad alpha {v:?}")))?,
    };
    let similarities = match map.get("similarity") {
        None => defaults.similarities,
        Some(v) => parse_list(v, "similarity", |s| match s {
            "sj" => Some(SimilarityKind::SetJaccard),
            "sc" => Some(SimilarityKind::SetCosine { alpha }),
            _ => None,
        })?,
    };
    let ks = match map.get("k") {
        None => defaults.ks,
        Some(v) => parse_list(v, "k", |s| s.parse::<usize>().ok())?,
    };
    for key in map.keys() {
        if !matches!(key.as_str(), "similarity" | "k" | "alpha") {
            return Err(Error::Config(format!("[{section}] unknown key {key:?}")));
        }
    }
    for &sim in &similarities {
        sim.validate()?;
    }
    for &k in &ks {
        KnnParams::new(similarities[0], k)?;
    }
    Ok(KnnGrid { similarities, ks })
}

fn factor_grid(map: &BTreeMap<String, String>) -> Result<FactorGrid> {
    let defaults = FactorGrid::table_defaults();
    let factors = match map.get("factors") {
        None => defaults.factors,
        Some(v) => parse_list(v, "factors", |s| s.parse::<usize>().ok())?,
    };
    let alphas = match map.get("alpha") {
        None => defaults.alphas,
        Some(v) => parse_list(v, "alpha", |s| s.parse::<f64>().ok())?,
    };
    let lambdas = match map.get("lambda") {
        None => defaults.lambdas,
        Some(v) => parse_list(v, "lambda", |s| s.parse::<f64>().ok())?,
    };
    let iterations = match map.get("iterations") {
        None => defaults.iterations,
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("[hkv] bad iterations {v:?}")))?,
    };
    for key in map.keys() {
        if !matches!(key.as_str(), "factors" | "alpha" | "lambda" | "iterations") {
            return Err(Error::Config(format!("[hkv] unknown key {key:?}")));
        }
    }
    let grid = FactorGrid {
        factors,
        alphas,
        lambdas,
        iterations,
    };
    for p in grid.points() {
        p.validate()?;
    }
    Ok(grid)
}

const TOP_KEYS: &[&str] = &[
    "checkins",
    "venues",
    "out",
    "seed",
    "jobs",
    "cutoff",
    "kcore",
    "train_start",
    "train_end",
    "test_start",
    "test_end",
    "cities",
    "strategies",
    "optima",
];

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")), overrides)
}

pub fn parse_config(text: &str, base: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let raw = split_sections(text)?;
    for key in raw.top.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
    }

    let get = |key: &str| -> Result<&str> {
        raw.top
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing required key {key:?}")))
    };
    let resolve = |p: &str| -> PathBuf {
        let pb = PathBuf::from(p);
        if pb.is_absolute() {
            pb
        } else {
            base.join(pb)
        }
    };

    let checkins = resolve(get("checkins")?);
    let venues = resolve(get("venues")?);
    let out = overrides
        .out
        .clone()
        .unwrap_or_else(|| resolve(raw.top.get("out").map(String::as_str).unwrap_or("out")));

    let parse_num = |key: &str, default: u64| -> Result<u64> {
        match raw.top.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad {key} value {v:?}"))),
        }
    };
    let seed = overrides.seed.unwrap_or(parse_num("seed", 42)?);
    let jobs = overrides.jobs.unwrap_or(parse_num("jobs", 0)? as usize);
    let cutoff = parse_num("cutoff", 5)? as usize;
    if cutoff < 1 {
        return Err(Error::Config("cutoff must be >= 1".into()));
    }
    let kcore = parse_num("kcore", 2)? as usize;
    if kcore < 1 {
        return Err(Error::Config("kcore must be >= 1".into()));
    }

    let train_window = DateRange::new(
        parse_date(get("train_start")?, "train_start")?,
        parse_date(get("train_end")?, "train_end")?,
    )?;
    let test_window = DateRange::new(
        parse_date(get("test_start")?, "test_start")?,
        parse_date(get("test_end")?, "test_end")?,
    )?;
    if train_window.overlaps(&test_window) || train_window.end >= test_window.start {
        return Err(Error::Config(
            "train window must end before the test window starts".into(),
        ));
    }

    let cities = match (&overrides.cities, raw.top.get("cities")) {
        (Some(list), _) => list.clone(),
        (None, Some(v)) => parse_list(v, "cities", |s| Some(s.to_owned()))?,
        (None, None) => Vec::new(),
    };

    let strategy_strings: Vec<String> = match (&overrides.strategies, raw.top.get("strategies")) {
        (Some(list), _) => list.clone(),
        (None, Some(v)) => parse_list(v, "strategies", |s| Some(s.to_owned()))?,
        (None, None) => vec!["single".to_owned()],
    };
    let strategies: Vec<Strategy> = strategy_strings
        .iter()
        .map(|s| parse_strategy(s))
        .collect::<Result<_>>()?;
    if strategies.is_empty() {
        return Err(Error::Config("no strategies configured".into()));
    }

    let optima = raw.top.get("optima").map(|p| resolve(p));

    let mut roster = Vec::new();
    for (name, map) in &raw.sections {
        let spec = match name.as_str() {
            "rnd" => RecSpec::Rnd,
            "pop" => RecSpec::Pop,
            "avgdis" => RecSpec::AvgDis,
            "pgn" => RecSpec::Pgn,
            "ub" => RecSpec::Ub(knn_grid(map, "ub")?),
            "ib" => RecSpec::Ib(knn_grid(map, "ib")?),
            "hkv" => RecSpec::Hkv(factor_grid(map)?),
            other => return Err(Error::Config(format!("unknown section [{other}]"))),
        };
        if !matches!(spec, RecSpec::Ub(_) | RecSpec::Ib(_) | RecSpec::Hkv(_)) && !map.is_empty() {
            return Err(Error::Config(format!("[{name}] takes no keys")));
        }
        roster.push(spec);
    }
    if roster.is_empty() {
        return Err(Error::Config("no recommenders configured".into()));
    }

    let mut config = ExperimentConfig {
        checkins,
        venues,
        out,
        seed,
        jobs,
        cutoff,
        kcore,
        train_window,
        test_window,
        cities,
        strategies,
        optima,
        roster,
        hash: 0,
    };
    config.hash = config_hash(&config);
    Ok(config)
}

/// Stable hash over everything that affects outputs.
fn config_hash(c: &ExperimentConfig) -> u64 {
    let mut s = String::new();
    let _ = write!(
        s,
        "checkins={};venues={};seed={};cutoff={};kcore={};train={}..{};test={}..{};",
        c.checkins.display(),
        c.venues.display(),
        c.seed,
        c.cutoff,
        c.kcore,
        c.train_window.start,
        c.train_window.end,
        c.test_window.start,
        c.test_window.end
    );
    let _ = write!(s, "cities={};", c.cities.join(","));
    for st in &c.strategies {
        let _ = write!(s, "strategy={st};");
    }
    if let Some(o) = &c.optima {
        let _ = write!(s, "optima={};", o.display());
    }
    for r in &c.roster {
        let _ = write!(s, "rec={}:", r.name());
        match r {
            RecSpec::Ub(g) | RecSpec::Ib(g) => {
                for sim in &g.similarities {
                    let _ = write!(s, "{sim},");
                }
                let _ = write!(s, "k={:?};", g.ks);
            }
            RecSpec::Hkv(g) => {
                let _ = write!(
                    s,
                    "f={:?},a={:?},l={:?},it={};",
                    g.factors, g.alphas, g.lambdas, g.iterations
                );
            }
            _ => {
                let _ = write!(s, ";");
            }
        }
    }
    fnv1a64(s.as_bytes())
}
