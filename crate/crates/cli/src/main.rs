use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sbnn::condensation::CycleGranularity;
use sbnn::harness::{
    analysis_report, load_remap, run_experiment_with, trace_episodes, validate_transfer, BudgetUnit, ExperimentConfig,
};
use sbnn::{load_network, ModelKind, RemapSpec, Task};

#[derive(Parser)]
#[command(
    name = "sbnn",
    version,
    about = "Evolve, validate and analyse self-building neural networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run CMA-ES experiments and write one directory per run.
    Evolve(EvolveArgs),
    /// Evaluate a saved network on a task, optionally through a remap.
    Validate(ValidateArgs),
    /// Summarise a directory of runs into CSV tables.
    Report(ReportArgs),
    /// Write a per-step CSV of a saved network playing a task.
    Trace(TraceArgs),
}

#[derive(Args)]
struct EvolveArgs {
    /// Flat TOML file with experiment settings; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    prune_rate: Option<f64>,
    #[arg(long)]
    prune_time: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    /// `evaluations` (default) or `episodes`.
    #[arg(long)]
    budget_unit: Option<BudgetUnit>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `component` (default) or `simple-cycle`.
    #[arg(long, value_parser = parse_granularity)]
    granularity: Option<CycleGranularity>,
    /// Print one line per generation.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    target: Task,
    /// TOML file with `input_map` and `output_map`, or a preset name
    /// (`lander-cartpole`, `lander-mountaincar`). Identity when omitted.
    #[arg(long)]
    remap_config: Option<String>,
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    task: Task,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_granularity(s: &str) -> Result<CycleGranularity, String> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "component" => Ok(CycleGranularity::Component),
        "simple-cycle" => Ok(CycleGranularity::SimpleCycle),
        other => Err(format!("unknown granularity `{other}`")),
    }
}

fn evolve(args: EvolveArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    macro_rules! apply {
        ($($field:ident <- $arg:ident),* $(,)?) => {
            $(if let Some(v) = args.$arg.clone() { cfg.$field = v; })*
        };
    }
    apply!(
        task <- task,
        model <- model,
        hidden <- hidden,
        prune_rate <- prune_rate,
        prune_time <- prune_time,
        eta <- eta,
        budget <- budget,
        budget_unit <- budget_unit,
        episodes_per_fitness <- episodes,
        runs <- runs,
        seed <- seed,
        out <- out,
        granularity <- granularity,
    );
    cfg.validate()?;

    let verbose = args.verbose;
    let outcomes = run_experiment_with(&cfg, |run, row| {
        if verbose {
            eprintln!(
                "run {run} gen {:>4} evals {:>6} best {:>9.3} median {:>9.3} sigma {:.4}",
                row.generation, row.evals, row.best, row.median, row.sigma
            );
        }
    })?;
    let mut failed = 0;
    for (run, o) in outcomes.iter().enumerate() {
        match o {
            Ok(o) => {
                let r = &o.evolved.best.record;
                println!(
                    "run {run}: fitness {:.3}, working {}/{} ({:.1}%), {} -> {}",
                    r.fitness,
                    r.working_connections,
                    r.total_connections,
                    r.working_percentage,
                    r.structure,
                    o.directory.display()
                );
            }
            Err(e) => {
                failed += 1;
                println!("run {run}: failed: {e}");
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} runs failed", outcomes.len());
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<()> {
    let remap = match &args.remap_config {
        None => {
            let spec = args.target.spec();
            RemapSpec::identity(spec.observation_dim, spec.action_count)
        }
        Some(name) => match RemapSpec::preset(name) {
            Some(r) => r,
            None => load_remap(name.as_ref()).with_context(|| format!("reading remap `{name}`"))?,
        },
    };
    let mean = validate_transfer(&args.network, remap, args.target, args.episodes, args.seed)?;
    println!("{mean}");
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let rep = analysis_report(&args.dir)?;
    let f = rep.fitness;
    println!(
        "{} runs: fitness mean {:.3} median {:.3} [{:.3}, {:.3}]",
        f.runs, f.mean, f.median, f.min, f.max
    );
    for s in &rep.structures {
        println!("  {}: {}", s.structure, s.runs);
    }
    println!("tables written to {}", args.dir.display());
    Ok(())
}

fn trace(args: TraceArgs) -> Result<()> {
    let network = load_network::<f64>(&args.network)?;
    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let totals = trace_episodes(network, args.task, args.episodes, args.seed, out)?;
    for (e, t) in totals.iter().enumerate() {
        eprintln!("episode {e}: reward {t}");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Evolve(a) => evolve(a),
        Command::Validate(a) => validate(a),
        Command::Report(a) => report(a),
        Command::Trace(a) => trace(a),
    }
}
