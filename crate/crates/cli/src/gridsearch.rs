//! Hyperparameter search: every grid point evaluated on the single-domain
//! scope, selected by precision at cutoff 5; ties keep the first-listed
//! point.

use std::collections::BTreeMap;

use cityrec_core::crossdomain::{build_profiles, build_scope, Strategy};
use cityrec_core::error::Result;
use cityrec_core::evaluation::{evaluate, EvaluationTask};
use cityrec_core::ids::CityId;
use cityrec_core::interactions::InteractionSet;

use crate::config::{ExperimentConfig, RecSpec};
use crate::pipeline::{fit_model, LoadedData, Params};

/// Cutoff of the selection metric.
const SELECTION_CUTOFF: usize = 5;

pub struct GridOutcome {
    pub city: String,
    pub recommender: &'static str,
    pub best: Params,
    pub best_p5: f64,
    pub evaluated_points: usize,
}

/// All grid points of one roster member, in declaration order.
fn points_of(spec: &RecSpec) -> Vec<Params> {
    match spec {
        RecSpec::Rnd | RecSpec::Pop | RecSpec::AvgDis | RecSpec::Pgn => vec![Params::None],
        RecSpec::Ub(g) | RecSpec::Ib(g) => g.points().into_iter().map(Params::Knn).collect(),
        RecSpec::Hkv(g) => g.points().into_iter().map(Params::Factor).collect(),
    }
}

pub fn grid_search(
    config: &ExperimentConfig,
    data: &LoadedData,
    cities: &[CityId],
    use_cache: bool,
) -> Result<Vec<GridOutcome>> {
    let profiles = build_profiles(&data.train_partitions, &data.corpus.venue_table)?;
    let cache_dir = use_cache.then(|| config.out.join("cache"));
    let empty = InteractionSet::empty();

    let mut outcomes = Vec::new();
    for &city in cities {
        let city_name = data.corpus.cities.name(city.0).to_owned();
        let scope = build_scope(
            city,
            Strategy::SingleDomain,
            &data.train_partitions,
            &profiles,
        )?;
        let test = data.test_partitions.get(&city).unwrap_or(&empty);
        let task = EvaluationTask::new(&scope, test, SELECTION_CUTOFF)?;

        for spec in &config.roster {
            let mut best: Option<(Params, f64)> = None;
            let points = points_of(spec);
            let evaluated_points = points.len();
            for params in points {
                let model = fit_model(
                    spec.name(),
                    &params,
                    &scope,
                    data,
                    config.seed,
                    cache_dir.as_deref(),
                )?;
                let p5 = evaluate(&model, &task).precision;
                // strict improvement only: earlier grid points win ties
                if best.as_ref().is_none_or(|(_, b)| p5 > *b) {
                    best = Some((params, p5));
                }
            }
            let (best, best_p5) = best.expect("grids are never empty");
            outcomes.push(GridOutcome {
                city: city_name.clone(),
                recommender: spec.name(),
                best,
                best_p5,
                evaluated_points,
            });
        }
    }
    Ok(outcomes)
}

/// Render the optima file consumed back through the `optima` config key.
///
/// The header records how many configurations the roster spans per city.
pub fn optima_file(config: &ExperimentConfig, outcomes: &[GridOutcome]) -> String {
    let per_city: usize = config.roster.iter().map(RecSpec::grid_size).sum();
    let mut out = String::new();
    out.push_str("# optima selected by precision@5 on the single-domain scope\n");
    out.push_str(&format!("# configurations-per-city={per_city}\n"));
    out.push_str("# city\trecommender\tparams\tp_at_5\n");

    let mut sorted: BTreeMap<(String, usize), &GridOutcome> = BTreeMap::new();
    for (idx, o) in outcomes.iter().enumerate() {
        // preserve roster order within a city
        sorted.insert((o.city.clone(), idx), o);
    }
    for o in sorted.values() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            o.city,
            o.recommender,
            o.best.canonical(),
            o.best_p5
        ));
    }
    out
}
