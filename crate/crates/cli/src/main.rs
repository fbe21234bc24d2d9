//! `cityrec`: venue-recommendation experiments with cities as domains.

mod config;
mod gridsearch;
mod pipeline;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cityrec_core::error::Result;
use cityrec_core::preprocess::corpus_stats;

use config::{load_config, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "cityrec",
    version,
    about = "Venue recommendation with cities as domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, deduplicate, and k-core filter the corpus; write statistics.
    Preprocess(CommonArgs),
    /// Preprocess plus the temporal train/test split.
    Split(CommonArgs),
    /// Evaluate every configured grid point per city; write the optima file.
    Gridsearch(CommonArgs),
    /// Full pipeline: scopes, fitting, evaluation, tables, overlap report.
    Run(CommonArgs),
    /// Re-render result tables from an existing metrics.csv.
    Tables(CommonArgs),
    /// Common-user overlap report per cross-domain strategy.
    Overlap(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Target cities override (comma-separated names).
    #[arg(long, value_delimiter = ',')]
    cities: Option<Vec<String>>,
    /// Strategy override: single, ncd:N, or pcd:N (comma-separated).
    #[arg(long, value_delimiter = ',')]
    strategy: Option<Vec<String>>,
}

impl CommonArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let overrides = Overrides {
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
            cities: self.cities.clone(),
            strategies: self.strategy.clone(),
        };
        let config = load_config(&self.config, &overrides)?;
        if config.jobs > 0 {
            // ignore the error if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build_global();
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess(args) => {
            let config = args.load()?;
            let data = pipeline::load(&config)?;
            report_load(&data);
            let artifacts = pipeline::write_preprocess_artifacts(&config, &data)?;
            let refs: Vec<&str> = artifacts.iter().map(String::as_str).collect();
            pipeline::write_manifest(&config, "complete", &refs)?;
            println!(
                "wrote {} artifacts to {}",
                artifacts.len(),
                config.out.display()
            );
            Ok(())
        }
        Command::Split(args) => {
            let config = args.load()?;
            let data = pipeline::load(&config)?;
            report_load(&data);
            let mut artifacts = pipeline::write_preprocess_artifacts(&config, &data)?;
            artifacts.extend(pipeline::write_split_artifacts(&config, &data)?);
            let refs: Vec<&str> = artifacts.iter().map(String::as_str).collect();
            pipeline::write_manifest(&config, "complete", &refs)?;
            println!(
                "train: {} interactions, test: {} interactions, discarded: {}",
                data.split.train.len(),
                data.split.test.len(),
                data.split.discarded
            );
            Ok(())
        }
        Command::Gridsearch(args) => {
            let config = args.load()?;
            let data = pipeline::load(&config)?;
            report_load(&data);
            let cities = pipeline::select_cities(&config, &data)?;
            let outcomes = gridsearch::grid_search(&config, &data, &cities, true)?;
            let text = gridsearch::optima_file(&config, &outcomes);
            std::fs::create_dir_all(&config.out)?;
            pipeline::write_atomic(&config.out.join("optima.tsv"), text.as_bytes())?;
            for o in &outcomes {
                println!(
                    "{}\t{}\t{}\tp@5={:.4} ({} points)",
                    o.city,
                    o.recommender,
                    o.best.canonical(),
                    o.best_p5,
                    o.evaluated_points
                );
            }
            println!("wrote {}", config.out.join("optima.tsv").display());
            Ok(())
        }
        Command::Run(args) => {
            let config = args.load()?;
            pipeline::run_pipeline(&config)?;
            println!("pipeline complete; artifacts in {}", config.out.display());
            Ok(())
        }
        Command::Tables(args) => {
            let config = args.load()?;
            let artifacts = tables::write_tables(&config)?;
            println!(
                "wrote {} table files to {}",
                artifacts.len(),
                config.out.display()
            );
            Ok(())
        }
        Command::Overlap(args) => {
            let config = args.load()?;
            let data = pipeline::load(&config)?;
            let cities = pipeline::select_cities(&config, &data)?;
            let rows = pipeline::overlap_rows(&config, &data, &cities)?;
            let text = tables::overlap_table(&rows);
            std::fs::create_dir_all(&config.out)?;
            pipeline::write_atomic(&config.out.join("overlap.tsv"), text.as_bytes())?;
            print!("{text}");
            Ok(())
        }
    }
}

fn report_load(data: &pipeline::LoadedData) {
    let stats = corpus_stats(&data.filtered);
    println!(
        "parsed {} check-ins ({} rejected lines); after dedup + core filter: {} users, {} venues, {} interactions",
        data.corpus.checkins.len(),
        data.report.rejected_count(),
        stats.users,
        stats.items,
        stats.checkins
    );
}
