//! Fitness evaluation of one genome.

use std::time::Instant;

use crate::activation::Agent;
use crate::env::Environment;
use crate::error::Result;
use crate::network::{ModelKind, Network};
use crate::pruning::{classify_structure, working_connections, PruneEvent};
use crate::scalar::Scalar;
use crate::seed::{derive, derive_path, stream};

use super::config::ExperimentConfig;
use super::record::{fitness_components, EvaluationSeeds, RunRecord};

/// A finished evaluation: its record and the network as it ended up
/// (pruned, with the weights it had grown).
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub record: RunRecord,
    pub network: Network<T>,
}

/// Seed of episode `episode` (0-based) of the evaluation seeded with `seed`.
pub fn episode_seed(seed: u64, episode: usize) -> u64 {
    derive_path(seed, &[stream::EPISODE, episode as u64])
}

pub fn shuffle_seed(seed: u64) -> u64 {
    derive(seed, stream::SHUFFLE)
}

/// Dispatches on the configured model.
pub fn evaluate<T: Scalar>(genome: &[T], config: &ExperimentConfig, seed: u64) -> Result<Evaluation<T>> {
    match config.model {
        ModelKind::Sbnn => evaluate_sbnn(genome, config, seed),
        ModelKind::Ffnn => evaluate_ffnn(genome, config, seed),
    }
}

/// SBNN lifecycle: all weights start at zero and grow under the genome's
/// ABCD rules for `prune_time` episodes; then the network is pruned, frozen
/// and switched to its condensed schedule for the remaining episodes.
pub fn evaluate_sbnn<T: Scalar>(genome: &[T], config: &ExperimentConfig, seed: u64) -> Result<Evaluation<T>> {
    config.validate()?;
    let spec = config.task.spec();
    let network = Network::sbnn(spec.observation_dim, config.hidden, spec.action_count)?.with_genome(genome)?;
    let mut agent = Agent::plastic(network, T::of(config.eta), shuffle_seed(seed)).with_granularity(config.granularity);
    let mut env = config.task.make();
    let pt = config.prune_time;

    let start = Instant::now();
    let mut rewards = Vec::with_capacity(config.episodes_per_fitness);
    let mut event = None;
    for e in 0..config.episodes_per_fitness {
        if e == pt {
            event = Some(agent.prune(config.prune_rate, pt));
        }
        rewards.push(agent.run_episode(&mut env, episode_seed(seed, e), |_, _| {})?);
    }
    let event = event.expect("prune_time is below the episode count");
    Ok(finish(config, seed, agent, rewards, event, Some(pt), start))
}

/// Baseline: genome entries are the weights. Pruning happens before the
/// first episode and the fitness is the plain mean reward.
pub fn evaluate_ffnn<T: Scalar>(genome: &[T], config: &ExperimentConfig, seed: u64) -> Result<Evaluation<T>> {
    config.validate()?;
    let spec = config.task.spec();
    let network = Network::ffnn(spec.observation_dim, config.hidden, spec.action_count)?.with_genome(genome)?;
    let mut agent = Agent::frozen(network, config.granularity, shuffle_seed(seed));
    let mut env = config.task.make();

    let start = Instant::now();
    let event = agent.prune(config.prune_rate, 0);
    let rewards = (0..config.episodes_per_fitness)
        .map(|e| agent.run_episode(&mut env, episode_seed(seed, e), |_, _| {}))
        .collect::<Result<Vec<f64>>>()?;
    Ok(finish(config, seed, agent, rewards, event, None, start))
}

fn finish<T: Scalar>(
    config: &ExperimentConfig,
    seed: u64,
    agent: Agent<T>,
    rewards: Vec<f64>,
    event: PruneEvent,
    prune_time: Option<usize>,
    start: Instant,
) -> Evaluation<T> {
    let elapsed = start.elapsed().as_secs_f64();
    let network = agent.into_network();
    let (fitness, pre, post) = fitness_components(&rewards, prune_time);
    let total = network.connections().len();
    let working = working_connections(&network).len();
    let record = RunRecord {
        task: config.task,
        model: config.model,
        episode_rewards: rewards,
        prune_event: event,
        fitness,
        pre_prune_mean: pre,
        post_prune_mean: post,
        total_connections: total,
        working_connections: working,
        working_percentage: if total == 0 {
            0.0
        } else {
            100.0 * working as f64 / total as f64
        },
        structure: classify_structure(&network),
        elapsed_seconds: elapsed,
        seeds: EvaluationSeeds {
            evaluation: seed,
            shuffle: shuffle_seed(seed),
        },
        run: None,
    };
    Evaluation { record, network }
}

/// Mean total reward of a frozen agent over `episodes` episodes.
pub fn mean_reward<T: Scalar, E: Environment + ?Sized>(
    agent: &mut Agent<T>,
    env: &mut E,
    episodes: usize,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for e in 0..episodes {
        total += agent.run_episode(env, episode_seed(seed, e), |_, _| {})?;
    }
    Ok(total / episodes as f64)
}
