//! Evolutionary runs and their on-disk artifacts.
//!
//! An experiment directory looks like
//!
//! ```text
//! out/
//!   manifest.csv
//!   run-000/
//!     config.toml
//!     trace.csv
//!     best_genome.json
//!     best_network.json
//!     run_record.json
//! ```
//!
//! Each run directory is assembled under a temporary name and renamed into
//! place once complete, so an interrupted experiment never leaves half a run.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmaes::CmaEs;
use crate::condensation::ActivationSchedule;
use crate::document::NetworkDocument;
use crate::error::{Error, Result};
use crate::seed::{derive_path, stream};

use super::config::ExperimentConfig;
use super::evaluate::{evaluate, Evaluation};
use super::record::{RunInfo, RunRecord};

/// One optimizer generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    /// Evaluations spent including this generation.
    pub evals: usize,
    pub best: f64,
    pub median: f64,
    pub sigma: f64,
}

/// Result of one evolutionary run, before anything is written.
#[derive(Clone, Debug)]
pub struct EvolvedRun {
    pub run: usize,
    pub best_genome: Vec<f64>,
    /// Best evaluation seen, with its run metadata filled in.
    pub best: Evaluation<f64>,
    pub trace: Vec<TraceRow>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub evolved: EvolvedRun,
    pub directory: PathBuf,
}

/// Seed shared by every genome of one generation, so that they all face the
/// same episode initial conditions.
pub fn generation_seed(master: u64, run: usize, generation: usize) -> u64 {
    derive_path(master, &[stream::EVALUATION, run as u64, generation as u64])
}

pub fn run_seed(master: u64, run: usize) -> u64 {
    derive_path(master, &[stream::OPTIMIZER, run as u64])
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Runs CMA-ES for one seed until the evaluation budget is spent. The last
/// generation may overshoot the budget by up to `lambda - 1` evaluations.
pub fn evolve(config: &ExperimentConfig, run: usize) -> Result<EvolvedRun> {
    evolve_with(config, run, |_| {})
}

/// As [`evolve`], reporting every generation to `progress`.
pub fn evolve_with(config: &ExperimentConfig, run: usize, mut progress: impl FnMut(&TraceRow)) -> Result<EvolvedRun> {
    config.validate()?;
    let budget = config.evaluation_budget();
    let seed = run_seed(config.seed, run);
    let mut es = CmaEs::<f64>::new(config.genome_length(), seed)?;
    let mut trace = Vec::new();
    let mut best: Option<(Vec<f64>, Evaluation<f64>)> = None;

    while es.evaluations() < budget {
        let generation = es.generation();
        let batch = es.ask()?;
        let eval_seed = generation_seed(config.seed, run, generation);
        let results = batch
            .par_iter()
            .map(|g| evaluate(g, config, eval_seed))
            .collect::<Result<Vec<_>>>()?;
        let fitness: Vec<f64> = results.iter().map(|e| e.record.fitness).collect();

        let (top, _) = fitness.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (k, &f)| if f > acc.1 { (k, f) } else { acc },
        );
        if best.as_ref().is_none_or(|(_, b)| fitness[top] > b.record.fitness) {
            best = Some((batch[top].clone(), results[top].clone()));
        }

        es.tell(&batch, &fitness)?;
        let row = TraceRow {
            generation,
            evals: es.evaluations(),
            best: fitness[top],
            median: median(&fitness),
            sigma: es.sigma(),
        };
        progress(&row);
        trace.push(row);
    }

    let (best_genome, mut best) = best.expect("budget allows at least one generation");
    best.record.run = Some(RunInfo {
        run,
        master_seed: config.seed,
        run_seed: seed,
        generations: es.generation(),
        evaluations: es.evaluations(),
    });
    Ok(EvolvedRun {
        run,
        best_genome,
        best,
        trace,
    })
}

pub fn run_directory_name(run: usize) -> String {
    format!("run-{run:03}")
}

/// Writes one run's artifacts atomically into `out/run-NNN`.
pub fn write_run(config: &ExperimentConfig, evolved: &EvolvedRun, out: &Path) -> Result<PathBuf> {
    let name = run_directory_name(evolved.run);
    let staging = out.join(format!(".{name}.partial"));
    let target = out.join(&name);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;

    let snapshot = staging.join("config.toml");
    fs::write(&snapshot, config.to_toml()?).map_err(|e| Error::io(&snapshot, e))?;

    let trace_path = staging.join("trace.csv");
    let mut w = csv::Writer::from_path(&trace_path)?;
    for row in &evolved.trace {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(&trace_path, e))?;

    let genome_path = staging.join("best_genome.json");
    fs::write(&genome_path, serde_json::to_string(&evolved.best_genome)?).map_err(|e| Error::io(&genome_path, e))?;

    let network = &evolved.best.network;
    let schedule = ActivationSchedule::for_network(network, config.granularity);
    NetworkDocument::from_network(network, Some(schedule)).save(&staging.join("best_network.json"))?;
    evolved.best.record.save(&staging.join("run_record.json"))?;

    if target.exists() {
        fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
    }
    fs::rename(&staging, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

#[derive(Debug, Serialize)]
struct ManifestRow<'a> {
    run: usize,
    status: &'a str,
    run_seed: u64,
    best_fitness: Option<f64>,
    pre_prune_mean: Option<f64>,
    post_prune_mean: Option<f64>,
    working_percentage: Option<f64>,
    structure: Option<String>,
    evaluations: Option<usize>,
    directory: Option<String>,
    error: Option<String>,
}

fn write_manifest(config: &ExperimentConfig, outcomes: &[Result<RunOutcome>], out: &Path) -> Result<()> {
    let path = out.join("manifest.csv");
    let staging = out.join(".manifest.csv.partial");
    let mut w = csv::Writer::from_path(&staging)?;
    for (run, outcome) in outcomes.iter().enumerate() {
        let seed = run_seed(config.seed, run);
        let row = match outcome {
            Ok(o) => {
                let r: &RunRecord = &o.evolved.best.record;
                ManifestRow {
                    run,
                    status: "ok",
                    run_seed: seed,
                    best_fitness: Some(r.fitness),
                    pre_prune_mean: r.pre_prune_mean,
                    post_prune_mean: Some(r.post_prune_mean),
                    working_percentage: Some(r.working_percentage),
                    structure: Some(r.structure.to_string()),
                    evaluations: r.run.map(|i| i.evaluations),
                    directory: Some(run_directory_name(run)),
                    error: None,
                }
            }
            Err(e) => ManifestRow {
                run,
                status: "failed",
                run_seed: seed,
                best_fitness: None,
                pre_prune_mean: None,
                post_prune_mean: None,
                working_percentage: None,
                structure: None,
                evaluations: None,
                directory: None,
                error: Some(e.to_string()),
            },
        };
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(&staging, e))?;
    drop(w);
    fs::rename(&staging, &path).map_err(|e| Error::io(&path, e))
}

/// Evolves `config.runs` independent runs and writes their artifacts under
/// `config.out`. A failing run is reported in its slot and in the manifest
/// while the others carry on. Configuration errors abort before anything is
/// written.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<Result<RunOutcome>>> {
    run_experiment_with(config, |_, _| {})
}

/// As [`run_experiment`], reporting `(run, generation row)` progress.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    mut progress: impl FnMut(usize, &TraceRow),
) -> Result<Vec<Result<RunOutcome>>> {
    config.validate()?;
    let out = &config.out;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut outcomes = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let outcome = evolve_with(config, run, |row| progress(run, row)).and_then(|evolved| {
            let directory = write_run(config, &evolved, out)?;
            Ok(RunOutcome { evolved, directory })
        });
        outcomes.push(outcome);
        write_manifest(config, &outcomes, out)?;
    }
    Ok(outcomes)
}
