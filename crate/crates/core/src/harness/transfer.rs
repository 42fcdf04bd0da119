//! Replaying saved networks: transfer to other tasks and per-step traces.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::activation::Agent;
use crate::condensation::CycleGranularity;
use crate::document::load_network;
use crate::env::{wrap_remapped, RemapSpec, Task};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::seed::derive;

use super::evaluate::{episode_seed, mean_reward};

/// Stream for validation episodes, kept apart from training seeds.
fn validation_seed(seed: u64) -> u64 {
    derive(seed, crate::seed::stream::VALIDATION)
}

/// Reads a remap from TOML with `input_map = [[slot, input], ...]` and
/// `output_map = [outputs...]`.
pub fn load_remap(path: &Path) -> Result<RemapSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(toml::from_str(&text)?)
}

/// Mean reward of a frozen network on `target` seen through `remap`. No
/// plasticity and no further pruning.
pub fn validate_network(
    network: Network<f64>,
    remap: RemapSpec,
    target: Task,
    episodes: usize,
    seed: u64,
) -> Result<f64> {
    if episodes == 0 {
        return Err(Error::Config("validation needs at least one episode".into()));
    }
    let mut env = wrap_remapped(network.inputs(), network.outputs(), target.make(), remap)?;
    let mut agent = Agent::frozen(network, CycleGranularity::default(), validation_seed(seed));
    mean_reward(&mut agent, &mut env, episodes, validation_seed(seed))
}

/// Loads a network file and runs [`validate_network`].
pub fn validate_transfer(
    network_file: &Path,
    remap: RemapSpec,
    target: Task,
    episodes: usize,
    seed: u64,
) -> Result<f64> {
    validate_network(load_network(network_file)?, remap, target, episodes, seed)
}

/// Plays episodes with a frozen network and writes one CSV row per step:
/// `episode, t, obs_0..obs_k, action, reward`. Returns the episode rewards.
pub fn trace_episodes<W: Write>(
    network: Network<f64>,
    task: Task,
    episodes: usize,
    seed: u64,
    out: W,
) -> Result<Vec<f64>> {
    let spec = task.spec();
    let mut env = wrap_remapped(
        network.inputs(),
        network.outputs(),
        task.make(),
        RemapSpec::identity(spec.observation_dim, spec.action_count),
    )?;
    let mut agent = Agent::frozen(network, CycleGranularity::default(), validation_seed(seed));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["episode".to_string(), "t".to_string()];
    header.extend((0..spec.observation_dim).map(|k| format!("obs_{k}")));
    header.extend(["action".to_string(), "reward".to_string()]);
    w.write_record(&header)?;

    let mut totals = Vec::with_capacity(episodes);
    for e in 0..episodes {
        let mut t = 0usize;
        let mut failure = None;
        let total = agent.run_episode(&mut env, episode_seed(validation_seed(seed), e), |obs, rec| {
            let mut row = vec![e.to_string(), t.to_string()];
            row.extend(obs.iter().map(|x| x.to_string()));
            row.push(rec.action.to_string());
            row.push(rec.reward.to_string());
            if let Err(err) = w.write_record(&row) {
                failure.get_or_insert(err);
            }
            t += 1;
        })?;
        if let Some(err) = failure {
            return Err(err.into());
        }
        totals.push(total);
    }
    w.flush().map_err(|e| Error::io("<trace output>", e))?;
    Ok(totals)
}
