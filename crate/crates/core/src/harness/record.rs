//! Per-evaluation results.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Task;
use crate::error::{Error, Result};
use crate::network::ModelKind;
use crate::pruning::{PruneEvent, StructureClass};

/// Seeds an evaluation ran with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationSeeds {
    /// Seed of the whole evaluation; episode and shuffle seeds derive from it.
    pub evaluation: u64,
    pub shuffle: u64,
}

/// Where the record came from inside an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub run: usize,
    pub master_seed: u64,
    pub run_seed: u64,
    pub generations: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: Task,
    pub model: ModelKind,
    pub episode_rewards: Vec<f64>,
    pub prune_event: PruneEvent,
    pub fitness: f64,
    /// Mean reward of the episodes before pruning; absent for the FFNN,
    /// which is pruned before it acts.
    pub pre_prune_mean: Option<f64>,
    pub post_prune_mean: f64,
    pub total_connections: usize,
    pub working_connections: usize,
    pub working_percentage: f64,
    pub structure: StructureClass,
    pub elapsed_seconds: f64,
    pub seeds: EvaluationSeeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Fitness and its components from episode rewards. With `prune_time` set,
/// the fitness is the plain average of the pre-prune and post-prune means.
pub fn fitness_components(rewards: &[f64], prune_time: Option<usize>) -> (f64, Option<f64>, f64) {
    match prune_time {
        Some(pt) => {
            let pre = mean(&rewards[..pt]);
            let post = mean(&rewards[pt..]);
            ((pre + post) / 2.0, Some(pre), post)
        }
        None => {
            let post = mean(rewards);
            (post, None, post)
        }
    }
}

impl RunRecord {
    /// Episodes played before pruning.
    pub fn prune_time(&self) -> Option<usize> {
        match self.model {
            ModelKind::Sbnn => Some(self.prune_event.episode),
            ModelKind::Ffnn => None,
        }
    }

    /// Fitness recombined from the stored rewards.
    pub fn recompute_fitness(&self) -> f64 {
        fitness_components(&self.episode_rewards, self.prune_time()).0
    }

    /// Relative improvement `(post - pre) / |pre|` of the post-prune reward
    /// mean over the pre-prune one, SBNN only. Positive means pruning helped,
    /// also for tasks with negative rewards.
    pub fn prune_boost(&self) -> Option<f64> {
        self.pre_prune_mean.map(|pre| (self.post_prune_mean - pre) / pre.abs())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
