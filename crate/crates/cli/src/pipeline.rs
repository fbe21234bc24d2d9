//! End-to-end pipeline: parse -> deduplicate -> k-core -> temporal split ->
//! per-city partitions -> training scopes -> fit -> evaluate -> artifacts.
//!
//! Everything downstream of the input files is deterministic given the
//! configuration and seed, so reruns produce byte-identical outputs.
//! Fitted factor models are cached on disk keyed by (scope fingerprint,
//! recommender, parameters, seed); anything else refits cheaply.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use cityrec_core::crossdomain::{
    avg_common_users, build_profiles, build_scope, CityProfile, Strategy, TrainingScope,
};
use cityrec_core::error::{Error, Result};
use cityrec_core::evaluation::{evaluate, EvaluationTask, MetricReport};
use cityrec_core::ids::CityId;
use cityrec_core::ingest::{parse_corpus, write_interactions, write_stats, ParseReport, RawCorpus};
use cityrec_core::interactions::InteractionSet;
use cityrec_core::preprocess::{
    corpus_stats, deduplicate, k_core, partition_by_city, temporal_split, TemporalSplit,
};
use cityrec_core::recommend::{
    fit_hkv, AvgDis, FactorModel, FactorModelParams, ItemKnn, KnnParams, Pgn, Popularity,
    RandomModel, Recommender, UserKnn,
};
use cityrec_core::rng::{component_seed, fnv1a64};
use cityrec_core::similarity::SimilarityKind;

use crate::config::{ExperimentConfig, RecSpec};
use crate::tables;

/// Parsed and preprocessed data shared by every stage.
pub struct LoadedData {
    pub corpus: RawCorpus,
    pub report: ParseReport,
    /// Deduplicated interactions before any other filtering; user sets per
    /// city from this set are the "raw" overlap variant.
    pub dedup: InteractionSet,
    /// After k-core filtering.
    pub filtered: InteractionSet,
    pub split: TemporalSplit,
    pub train_partitions: BTreeMap<CityId, InteractionSet>,
    pub test_partitions: BTreeMap<CityId, InteractionSet>,
}

pub fn load(config: &ExperimentConfig) -> Result<LoadedData> {
    let checkins = fs::File::open(&config.checkins)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", config.checkins.display())))?;
    let venues = fs::File::open(&config.venues)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", config.venues.display())))?;
    let (corpus, report) = parse_corpus(BufReader::new(checkins), BufReader::new(venues))?;

    let dedup = deduplicate(&corpus);
    let filtered = k_core(&dedup, config.kcore)?;
    let split = temporal_split(&filtered, config.train_window, config.test_window)?;
    let train_partitions = partition_by_city(&split.train, &corpus.venue_table)?;
    let test_partitions = partition_by_city(&split.test, &corpus.venue_table)?;

    Ok(LoadedData {
        corpus,
        report,
        dedup,
        filtered,
        split,
        train_partitions,
        test_partitions,
    })
}

/// Cities to evaluate: the configured list resolved against the data, or
/// every city with training data, ordered by name.
pub fn select_cities(config: &ExperimentConfig, data: &LoadedData) -> Result<Vec<CityId>> {
    let mut cities: Vec<CityId> = if config.cities.is_empty() {
        data.train_partitions.keys().copied().collect()
    } else {
        config
            .cities
            .iter()
            .map(|name| {
                let id = data
                    .corpus
                    .cities
                    .get(name)
                    .ok_or_else(|| Error::Config(format!("unknown city {name:?}")))?;
                let id = CityId(id);
                if !data.train_partitions.contains_key(&id) {
                    return Err(Error::Config(format!("city {name:?} has no training data")));
                }
                Ok(id)
            })
            .collect::<Result<_>>()?
    };
    cities.sort_by(|a, b| {
        data.corpus
            .cities
            .name(a.0)
            .cmp(data.corpus.cities.name(b.0))
    });
    Ok(cities)
}

/// Resolved (single-point) parameters for one fitted model.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    None,
    Knn(KnnParams),
    Factor(FactorModelParams),
}

impl Params {
    /// Canonical string form; round-trips through `parse_params`.
    pub fn canonical(&self) -> String {
        match self {
            Params::None => "-".into(),
            Params::Knn(p) => match p.similarity {
                SimilarityKind::SetJaccard => format!("similarity=sj;k={}", p.k),
                SimilarityKind::SetCosine { alpha } => {
                    format!("similarity=sc;alpha={alpha};k={}", p.k)
                }
            },
            Params::Factor(p) => format!(
                "factors={};alpha={};lambda={};iterations={}",
                p.factors, p.confidence_alpha, p.lambda, p.iterations
            ),
        }
    }
}

const KNOWN_RECOMMENDERS: &[&str] = &["rnd", "pop", "avgdis", "pgn", "ub", "ib", "hkv"];

/// Parse the canonical parameter string for a recommender.
pub fn parse_params(rec: &str, s: &str) -> Result<Params> {
    if !KNOWN_RECOMMENDERS.contains(&rec) {
        return Err(Error::Config(format!("unknown recommender {rec:?}")));
    }
    if s == "-" {
        return Ok(Params::None);
    }
    let mut map = BTreeMap::new();
    for part in s.split(';') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad parameter chunk {part:?}")))?;
        map.insert(k.trim(), v.trim());
    }
    let num = |key: &str| -> Result<f64> {
        map.get(key)
            .ok_or_else(|| Error::Config(format!("{rec}: missing parameter {key:?} in {s:?}")))?
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("{rec}: bad number for {key:?} in {s:?}")))
    };
    match rec {
        "ub" | "ib" => {
            let similarity = match map.get("similarity") {
                Some(&"sj") => SimilarityKind::SetJaccard,
                Some(&"sc") => SimilarityKind::SetCosine {
                    alpha: if map.contains_key("alpha") {
                        num("alpha")?
                    } else {
                        0.5
                    },
                },
                other => {
                    return Err(Error::Config(format!(
                        "{rec}: bad similarity {other:?} in {s:?}"
                    )))
                }
            };
            KnnParams::new(similarity, num("k")? as usize).map(Params::Knn)
        }
        "hkv" => {
            let iterations = if map.contains_key("iterations") {
                num("iterations")? as usize
            } else {
                20
            };
            FactorModelParams::new(
                num("factors")? as usize,
                num("alpha")?,
                num("lambda")?,
                iterations,
            )
            .map(Params::Factor)
        }
        other => Err(Error::Config(format!(
            "{other} takes no parameters; use \"-\""
        ))),
    }
}

/// Optima file: `city \t recommender \t params \t p_at_5` with `#` comments.
pub fn load_optima(path: &Path) -> Result<BTreeMap<(String, String), Params>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read optima {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::Config(format!(
                "optima line {}: expected city, recommender, params",
                idx + 1
            )));
        }
        let params = parse_params(fields[1], fields[2])?;
        map.insert((fields[0].to_owned(), fields[1].to_owned()), params);
    }
    Ok(map)
}

/// Pick the parameters to run for (city, recommender): an optima entry if
/// present, otherwise the grid, which must then be a single point.
pub fn resolve_params(
    spec: &RecSpec,
    city_name: &str,
    optima: &BTreeMap<(String, String), Params>,
) -> Result<Params> {
    if let Some(p) = optima.get(&(city_name.to_owned(), spec.name().to_owned())) {
        return Ok(p.clone());
    }
    match spec {
        RecSpec::Rnd | RecSpec::Pop | RecSpec::AvgDis | RecSpec::Pgn => Ok(Params::None),
        RecSpec::Ub(g) | RecSpec::Ib(g) => {
            let points = g.points();
            match points.as_slice() {
                [only] => Ok(Params::Knn(*only)),
                _ => Err(Error::Config(format!(
                    "{} has {} grid points for city {city_name}; run gridsearch or provide an optima file",
                    spec.name(),
                    points.len()
                ))),
            }
        }
        RecSpec::Hkv(g) => {
            let points = g.points();
            match points.as_slice() {
                [only] => Ok(Params::Factor(*only)),
                _ => Err(Error::Config(format!(
                    "hkv has {} grid points for city {city_name}; run gridsearch or provide an optima file",
                    points.len()
                ))),
            }
        }
    }
}

/// Fit one model on a scope. Factor models go through the on-disk cache
/// when a cache directory is given.
pub fn fit_model(
    name: &str,
    params: &Params,
    scope: &TrainingScope,
    data: &LoadedData,
    master_seed: u64,
    cache_dir: Option<&Path>,
) -> Result<Box<dyn Recommender>> {
    match (name, params) {
        ("rnd", Params::None) => Ok(Box::new(RandomModel::fit(component_seed(
            master_seed,
            "rnd",
        )))),
        ("pop", Params::None) => Ok(Box::new(Popularity::fit(&scope.merged_train))),
        ("avgdis", Params::None) => Ok(Box::new(AvgDis::fit(
            &scope.merged_train,
            &data.corpus.venue_table,
        ))),
        ("pgn", Params::None) => Ok(Box::new(Pgn::fit(
            &scope.merged_train,
            &data.corpus.venue_table,
        ))),
        ("ub", Params::Knn(p)) => Ok(Box::new(UserKnn::fit(&scope.merged_train, *p))),
        ("ib", Params::Knn(p)) => Ok(Box::new(ItemKnn::fit(&scope.merged_train, *p))),
        ("hkv", Params::Factor(p)) => {
            let seed = component_seed(master_seed, "hkv");
            Ok(Box::new(fit_factor_cached(scope, p, seed, cache_dir)?))
        }
        _ => Err(Error::Config(format!(
            "recommender {name} given incompatible parameters"
        ))),
    }
}

/// Cache key: everything that determines the fitted factors.
fn factor_cache_key(scope: &TrainingScope, params: &FactorModelParams, seed: u64) -> u64 {
    let tag = format!(
        "{:016x}|hkv|{}|{}",
        scope.merged_train.fingerprint(),
        Params::Factor(*params).canonical(),
        seed
    );
    fnv1a64(tag.as_bytes())
}

fn fit_factor_cached(
    scope: &TrainingScope,
    params: &FactorModelParams,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<FactorModel> {
    let path = cache_dir.map(|dir| {
        dir.join(format!(
            "hkv_{:016x}.fm",
            factor_cache_key(scope, params, seed)
        ))
    });
    if let Some(path) = &path {
        if let Ok(file) = fs::File::open(path) {
            if let Ok(model) = FactorModel::read_from(BufReader::new(file)) {
                if model.factors() == params.factors {
                    return Ok(model);
                }
            }
            // unreadable or mismatched cache entries are refit
        }
    }
    let model = fit_hkv(&scope.merged_train, params, seed)?;
    if let Some(path) = &path {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut buf = Vec::new();
        model.write_to(&mut buf)?;
        write_atomic(path, &buf)?;
    }
    Ok(model)
}

/// One evaluated cell of the experiment.
pub struct EvalRow {
    pub city: String,
    pub strategy: Strategy,
    pub recommender: String,
    pub params: Params,
    pub report: MetricReport,
}

/// Fit and evaluate the whole roster over every (city, strategy) scope.
pub fn run_experiments(
    config: &ExperimentConfig,
    data: &LoadedData,
    cities: &[CityId],
    cache: bool,
) -> Result<Vec<EvalRow>> {
    let profiles = build_profiles(&data.train_partitions, &data.corpus.venue_table)?;
    let optima = match &config.optima {
        Some(path) => load_optima(path)?,
        None => BTreeMap::new(),
    };
    let cache_dir = cache.then(|| config.out.join("cache"));
    let empty = InteractionSet::empty();

    // resolve everything up front so configuration errors surface before
    // any expensive fitting starts
    let mut jobs = Vec::new();
    for &city in cities {
        let city_name = data.corpus.cities.name(city.0).to_owned();
        for &strategy in &config.strategies {
            for spec in &config.roster {
                let params = resolve_params(spec, &city_name, &optima)?;
                jobs.push((city, city_name.clone(), strategy, spec.name(), params));
            }
        }
    }

    let mut scopes: BTreeMap<(CityId, String), TrainingScope> = BTreeMap::new();
    for &city in cities {
        for &strategy in &config.strategies {
            scopes.insert(
                (city, strategy.to_string()),
                build_scope(city, strategy, &data.train_partitions, &profiles)?,
            );
        }
    }

    let mut rows = Vec::new();
    for (city, city_name, strategy, rec, params) in jobs {
        let scope = &scopes[&(city, strategy.to_string())];
        let test = data.test_partitions.get(&city).unwrap_or(&empty);
        let model = fit_model(rec, &params, scope, data, config.seed, cache_dir.as_deref())?;
        let task = EvaluationTask::new(scope, test, config.cutoff)?;
        let report = evaluate(&model, &task);
        rows.push(EvalRow {
            city: city_name,
            strategy,
            recommender: rec.to_owned(),
            params,
            report,
        });
    }
    Ok(rows)
}

/// Overlap diagnostics for both user-set variants: "train" uses the
/// training partitions, "raw" uses the full deduplicated corpus before
/// filtering and splitting.
pub fn overlap_rows(
    config: &ExperimentConfig,
    data: &LoadedData,
    cities: &[CityId],
) -> Result<Vec<(String, Strategy, String, f64)>> {
    let train_profiles = build_profiles(&data.train_partitions, &data.corpus.venue_table)?;
    let raw_partitions = partition_by_city(&data.dedup, &data.corpus.venue_table)?;
    let raw_profiles = build_profiles(&raw_partitions, &data.corpus.venue_table)?;

    let mut rows = Vec::new();
    for (variant, profiles) in [("train", &train_profiles), ("raw", &raw_profiles)] {
        for &strategy in &config.strategies {
            if strategy == Strategy::SingleDomain {
                continue;
            }
            for &city in cities {
                let value = avg_common_users(city, strategy, profiles)?;
                rows.push((
                    variant.to_owned(),
                    strategy,
                    data.corpus.cities.name(city.0).to_owned(),
                    value,
                ));
            }
        }
    }
    Ok(rows)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    out.join("manifest.txt")
}

pub fn write_manifest(config: &ExperimentConfig, status: &str, artifacts: &[&str]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("config_hash={:016x}\n", config.hash));
    text.push_str(&format!("seed={}\n", config.seed));
    text.push_str(&format!("status={status}\n"));
    for a in artifacts {
        text.push_str(&format!("artifact={a}\n"));
    }
    write_atomic(&manifest_path(&config.out), text.as_bytes())
}

/// Write parse report and corpus statistics (full / train / test).
pub fn write_preprocess_artifacts(
    config: &ExperimentConfig,
    data: &LoadedData,
) -> Result<Vec<String>> {
    fs::create_dir_all(&config.out)?;
    let mut artifacts = Vec::new();

    let mut buf = Vec::new();
    data.report.write_to(&mut buf)?;
    write_atomic(&config.out.join("parse_report.txt"), &buf)?;
    artifacts.push("parse_report.txt".to_owned());

    for (name, set) in [
        ("stats_full.txt", &data.filtered),
        ("stats_train.txt", &data.split.train),
        ("stats_test.txt", &data.split.test),
    ] {
        let mut buf = Vec::new();
        write_stats(&mut buf, &corpus_stats(set))?;
        write_atomic(&config.out.join(name), &buf)?;
        artifacts.push(name.to_owned());
    }

    let mut buf = Vec::new();
    write_interactions(
        &mut buf,
        &data.filtered,
        &data.corpus.users,
        &data.corpus.venues,
    )?;
    write_atomic(&config.out.join("interactions.tsv"), &buf)?;
    artifacts.push("interactions.tsv".to_owned());

    Ok(artifacts)
}

/// Write the split back in the check-in format.
pub fn write_split_artifacts(config: &ExperimentConfig, data: &LoadedData) -> Result<Vec<String>> {
    fs::create_dir_all(&config.out)?;
    let mut artifacts = Vec::new();
    for (name, set) in [
        ("train.tsv", &data.split.train),
        ("test.tsv", &data.split.test),
    ] {
        let mut buf = Vec::new();
        write_interactions(&mut buf, set, &data.corpus.users, &data.corpus.venues)?;
        write_atomic(&config.out.join(name), &buf)?;
        artifacts.push(name.to_owned());
    }
    Ok(artifacts)
}

/// Scope manifests as key=value blocks.
pub fn write_scope_manifests(
    config: &ExperimentConfig,
    data: &LoadedData,
    cities: &[CityId],
) -> Result<String> {
    let profiles: BTreeMap<CityId, CityProfile> =
        build_profiles(&data.train_partitions, &data.corpus.venue_table)?;
    let mut text = String::new();
    for &city in cities {
        for &strategy in &config.strategies {
            let scope = build_scope(city, strategy, &data.train_partitions, &profiles)?;
            let sources: Vec<&str> = scope
                .source_cities
                .iter()
                .map(|c| data.corpus.cities.name(c.0))
                .collect();
            text.push_str(&format!(
                "scope.target={}\n",
                data.corpus.cities.name(city.0)
            ));
            text.push_str(&format!("scope.strategy={strategy}\n"));
            text.push_str(&format!("scope.sources={}\n", sources.join(",")));
            text.push_str(&format!(
                "scope.users={}\n",
                scope.merged_train.user_count()
            ));
            text.push_str(&format!(
                "scope.venues={}\n",
                scope.merged_train.venue_count()
            ));
            text.push_str(&format!(
                "scope.interactions={}\n\n",
                scope.merged_train.len()
            ));
        }
    }
    Ok(text)
}

/// The `run` subcommand: the full pipeline, all artifacts.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&config.out)?;
    write_manifest(config, "running", &[])?;

    let outcome = (|| -> Result<Vec<String>> {
        let data = load(config)?;
        let cities = select_cities(config, &data)?;
        let mut artifacts = write_preprocess_artifacts(config, &data)?;
        artifacts.extend(write_split_artifacts(config, &data)?);

        let scopes_text = write_scope_manifests(config, &data, &cities)?;
        write_atomic(&config.out.join("scopes.txt"), scopes_text.as_bytes())?;
        artifacts.push("scopes.txt".to_owned());

        let rows = run_experiments(config, &data, &cities, true)?;
        for row in &rows {
            println!(
                "{}\t{}\t{}\t{}\tndcg@{}={:.4}\tcoverage={:.3}",
                row.city,
                row.strategy,
                row.recommender,
                row.params.canonical(),
                row.report.cutoff,
                row.report.ndcg,
                row.report.coverage()
            );
        }
        let metrics = tables::metrics_csv(&rows);
        write_atomic(&config.out.join("metrics.csv"), metrics.as_bytes())?;
        artifacts.push("metrics.csv".to_owned());

        artifacts.extend(tables::write_tables(config)?);

        let overlap = overlap_rows(config, &data, &cities)?;
        let overlap_text = tables::overlap_table(&overlap);
        write_atomic(&config.out.join("overlap.tsv"), overlap_text.as_bytes())?;
        artifacts.push("overlap.tsv".to_owned());

        Ok(artifacts)
    })();

    match outcome {
        Ok(artifacts) => {
            let refs: Vec<&str> = artifacts.iter().map(String::as_str).collect();
            write_manifest(config, "complete", &refs)?;
            Ok(())
        }
        Err(e) => {
            // leave a stale marker so partial outputs are recognizable
            let _ = write_manifest(config, &format!("failed: {e}"), &[]);
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cityrec_core::fixture::{generate, FixtureSpec};

    fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
        let (checkins, venues) = generate(&FixtureSpec::three_city(), 42);
        let c = dir.join("checkins.tsv");
        let v = dir.join("venues.tsv");
        fs::write(&c, checkins).unwrap();
        fs::write(&v, venues).unwrap();
        (c, v)
    }

    fn test_config(dir: &Path) -> ExperimentConfig {
        let (c, v) = write_fixture(dir);
        let text = format!(
            "checkins = {}\nvenues = {}\nout = {}\nseed = 7\n\
             train_start = 2012-05-01\ntrain_end = 2012-10-31\n\
             test_start = 2012-11-01\ntest_end = 2012-11-30\n\
             strategies = single,ncd:1\n\n[pop]\n[ub]\nsimilarity = sj\nk = 20\n",
            c.display(),
            v.display(),
            dir.join("out").display()
        );
        crate::config::parse_config(&text, dir, &Default::default()).unwrap()
    }

    #[test]
    fn params_canonical_round_trips() {
        let cases = [
            (
                "ub",
                Params::Knn(KnnParams::new(SimilarityKind::SetJaccard, 90).unwrap()),
            ),
            (
                "ib",
                Params::Knn(KnnParams::new(SimilarityKind::SetCosine { alpha: 0.5 }, 100).unwrap()),
            ),
            (
                "hkv",
                Params::Factor(FactorModelParams::new(50, 10.0, 0.1, 20).unwrap()),
            ),
            ("pop", Params::None),
        ];
        for (rec, p) in cases {
            let s = p.canonical();
            let back = parse_params(rec, &s).unwrap();
            assert_eq!(back, p, "round-trip failed for {s}");
        }
    }

    #[test]
    fn optima_files_reject_unknown_recommenders() {
        assert!(parse_params("ubb", "similarity=sj;k=5").is_err());
        assert!(parse_params("pop", "k=5").is_err());
        assert!(parse_params("pop", "-").is_ok());
    }

    #[test]
    fn shipped_preset_parses() {
        let path =
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets/foursquare_optima.tsv");
        let optima = load_optima(&path).unwrap();
        assert_eq!(optima.len(), 24);
        assert_eq!(
            optima[&("Moscow".to_owned(), "hkv".to_owned())],
            Params::Factor(FactorModelParams::new(50, 10.0, 1.0, 20).unwrap())
        );
        assert_eq!(
            optima[&("Tokyo".to_owned(), "ub".to_owned())],
            Params::Knn(KnnParams::new(SimilarityKind::SetJaccard, 80).unwrap())
        );
    }

    #[test]
    fn run_experiments_produces_a_row_per_job() {
        let dir = std::env::temp_dir().join(format!("cityrec_pipe_{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let config = test_config(&dir);
        let data = load(&config).unwrap();
        let cities = select_cities(&config, &data).unwrap();
        assert_eq!(cities.len(), 3);
        let rows = run_experiments(&config, &data, &cities, false).unwrap();
        // 3 cities x 2 strategies x 2 recommenders
        assert_eq!(rows.len(), 12);
        for row in &rows {
            assert!(row.report.evaluated_users + row.report.abstained_users > 0);
        }
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn factor_cache_reuses_only_exact_matches() {
        let dir = std::env::temp_dir().join(format!("cityrec_cache_{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let config = test_config(&dir);
        let data = load(&config).unwrap();
        let cities = select_cities(&config, &data).unwrap();
        let profiles = build_profiles(&data.train_partitions, &data.corpus.venue_table).unwrap();
        let scope = build_scope(
            cities[0],
            Strategy::SingleDomain,
            &data.train_partitions,
            &profiles,
        )
        .unwrap();

        let params = FactorModelParams::new(4, 1.0, 0.1, 3).unwrap();
        let cache = dir.join("cache");
        let a = fit_factor_cached(&scope, &params, 5, Some(&cache)).unwrap();
        // second call loads the dump: identical factors
        let b = fit_factor_cached(&scope, &params, 5, Some(&cache)).unwrap();
        assert_eq!(a.user_factors(), b.user_factors());

        // different parameters and different seeds key differently
        let params2 = FactorModelParams::new(4, 1.0, 0.2, 3).unwrap();
        assert_ne!(
            factor_cache_key(&scope, &params, 5),
            factor_cache_key(&scope, &params2, 5)
        );
        assert_ne!(
            factor_cache_key(&scope, &params, 5),
            factor_cache_key(&scope, &params, 6)
        );

        // different scope keys differently
        let scope2 = build_scope(
            cities[1],
            Strategy::SingleDomain,
            &data.train_partitions,
            &profiles,
        )
        .unwrap();
        assert_ne!(
            factor_cache_key(&scope, &params, 5),
            factor_cache_key(&scope2, &params, 5)
        );
        fs::remove_dir_all(&dir).ok();
    }
}
