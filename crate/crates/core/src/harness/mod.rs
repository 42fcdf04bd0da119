//! Experiment driver: fitness evaluation, evolutionary runs, persistence and
//! reporting.

mod config;
mod evaluate;
mod experiment;
mod record;
mod report;
mod transfer;

pub use config::{BudgetUnit, ExperimentConfig};
pub use evaluate::{episode_seed, evaluate, evaluate_ffnn, evaluate_sbnn, mean_reward, shuffle_seed, Evaluation};
pub use experiment::{
    evolve, evolve_with, generation_seed, run_directory_name, run_experiment, run_experiment_with, run_seed, write_run,
    EvolvedRun, RunOutcome, TraceRow,
};
pub use record::{fitness_components, EvaluationSeeds, RunInfo, RunRecord};
pub use report::{
    analysis_report, fitness_stats, load_records, parameter_row, parameter_table, working_bin, FitnessStats,
    HistogramRow, ParameterRow, Report, StructureRow,
};
pub use transfer::{load_remap, trace_episodes, validate_network, validate_transfer};
