//! Experiment configuration, read from a flat TOML file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::condensation::CycleGranularity;
use crate::env::Task;
use crate::error::{Error, Result};
use crate::network::{ffnn_connection_count, sbnn_connection_count, ModelKind};
use crate::plasticity::DEFAULT_ETA;

/// What the evaluation budget counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetUnit {
    /// Genome evaluations, each costing `episodes_per_fitness` episodes.
    #[default]
    Evaluations,
    /// Episodes; divided by `episodes_per_fitness` to get evaluations.
    Episodes,
}

impl std::str::FromStr for BudgetUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "evaluations" | "evals" => Ok(BudgetUnit::Evaluations),
            "episodes" => Ok(BudgetUnit::Episodes),
            other => Err(Error::Config(format!("unknown budget unit `{other}`"))),
        }
    }
}

/// Every knob of an evolutionary experiment. Unknown keys in a config file
/// are rejected; missing keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub model: ModelKind,
    /// Hidden nodes `hn`.
    pub hidden: usize,
    /// Percentage of connections removed, `pr` in `[0, 100]`.
    pub prune_rate: f64,
    /// Episode after which the SBNN is pruned, `pt`. Ignored for the FFNN,
    /// which is pruned before its first episode.
    pub prune_time: usize,
    pub eta: f64,
    pub budget: usize,
    pub budget_unit: BudgetUnit,
    pub episodes_per_fitness: usize,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub granularity: CycleGranularity,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::CartPole,
            model: ModelKind::Sbnn,
            hidden: 3,
            prune_rate: 40.0,
            prune_time: 5,
            eta: DEFAULT_ETA,
            budget: 2000,
            budget_unit: BudgetUnit::Evaluations,
            episodes_per_fitness: 100,
            runs: 1,
            seed: 0,
            out: PathBuf::from("runs"),
            granularity: CycleGranularity::Component,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if self.episodes_per_fitness == 0 {
            return Err(Error::Config("episodes_per_fitness must be positive".into()));
        }
        if self.evaluation_budget() == 0 {
            return Err(Error::Config(format!(
                "an episode budget of {} is less than one evaluation of {} episodes",
                self.budget, self.episodes_per_fitness
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be positive".into()));
        }
        if !(0.0..=100.0).contains(&self.prune_rate) {
            return Err(Error::Config(format!(
                "prune_rate {} is outside [0, 100]",
                self.prune_rate
            )));
        }
        if !self.eta.is_finite() {
            return Err(Error::Config("eta must be finite".into()));
        }
        if self.model == ModelKind::Sbnn && (self.prune_time < 1 || self.prune_time >= self.episodes_per_fitness) {
            return Err(Error::Config(format!(
                "prune_time {} must lie in [1, {})",
                self.prune_time, self.episodes_per_fitness
            )));
        }
        if self.model == ModelKind::Ffnn && self.hidden == 0 {
            return Err(Error::Config(
                "the feed-forward baseline needs at least one hidden node".into(),
            ));
        }
        Ok(())
    }

    /// Budget expressed in genome evaluations.
    pub fn evaluation_budget(&self) -> usize {
        match self.budget_unit {
            BudgetUnit::Evaluations => self.budget,
            BudgetUnit::Episodes => self.budget / self.episodes_per_fitness.max(1),
        }
    }

    pub fn connection_count(&self) -> usize {
        let spec = self.task.spec();
        match self.model {
            ModelKind::Sbnn => sbnn_connection_count(spec.observation_dim, self.hidden, spec.action_count),
            ModelKind::Ffnn => ffnn_connection_count(spec.observation_dim, self.hidden, spec.action_count),
        }
    }

    /// Optimizer dimension: four rule coefficients per SBNN connection, one
    /// weight per FFNN connection.
    pub fn genome_length(&self) -> usize {
        match self.model {
            ModelKind::Sbnn => 4 * self.connection_count(),
            ModelKind::Ffnn => self.connection_count(),
        }
    }
}
