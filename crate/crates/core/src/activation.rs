//! Forward passes and the agent that couples them to plasticity and pruning.
//!
//! Every node squashes its input with `tanh`, inputs included. Activations
//! live in one buffer that persists across the timesteps of an episode, so a
//! hidden node that has not been updated yet in the current pass contributes
//! its value from the previous pass.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::condensation::{ActivationSchedule, CycleGranularity};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::plasticity::{hebbian_step, HebbianConfig};
use crate::pruning::{global_magnitude_prune, PruneEvent};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Hidden nodes fire in a fresh random permutation every pass.
    PrePrune,
    /// Hidden nodes follow the condensed topological schedule.
    PostPrune,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HiddenOrder {
    Random,
    Scheduled(ActivationSchedule),
}

impl HiddenOrder {
    pub fn phase(&self) -> Phase {
        match self {
            HiddenOrder::Random => Phase::PrePrune,
            HiddenOrder::Scheduled(_) => Phase::PostPrune,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ActivationState<T> {
    values: Vec<T>,
    rng: ChaCha8Rng,
    permutation: Vec<usize>,
}

impl<T: Scalar> ActivationState<T> {
    pub fn new<U: Scalar>(network: &Network<U>, shuffle_seed: u64) -> Self {
        ActivationState {
            values: vec![T::zero(); network.node_count()],
            rng: ChaCha8Rng::seed_from_u64(shuffle_seed),
            permutation: network.hidden_range().collect(),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Zeroes the buffer; the shuffle stream carries on.
    pub fn reset(&mut self) {
        self.values.iter_mut().for_each(|v| *v = T::zero());
    }
}

#[inline]
fn fire<T: Scalar>(network: &Network<T>, incoming: &[usize], values: &[T]) -> T {
    let conns = network.connections();
    incoming
        .iter()
        .map(|&k| conns[k].weight * values[conns[k].src.index])
        .sum::<T>()
        .tanh()
}

/// One forward pass. `incoming` is [`Network::incoming_active`] for the same
/// network. Returns the output activations.
pub fn forward<'s, T: Scalar>(
    network: &Network<T>,
    incoming: &[Vec<usize>],
    order: &HiddenOrder,
    observation: &[T],
    state: &'s mut ActivationState<T>,
) -> Result<&'s [T]> {
    if observation.len() != network.inputs() {
        return Err(Error::ObservationLength {
            expected: network.inputs(),
            actual: observation.len(),
        });
    }
    for (v, &o) in state.values.iter_mut().zip(observation) {
        *v = o.tanh();
    }
    match order {
        HiddenOrder::Random => {
            state.permutation.shuffle(&mut state.rng);
            for &h in &state.permutation {
                state.values[h] = fire(network, &incoming[h], &state.values);
            }
        }
        HiddenOrder::Scheduled(schedule) => {
            let values = &mut state.values;
            schedule.visit(&mut state.rng, |h| {
                values[h] = fire(network, &incoming[h], values);
            });
        }
    }
    for o in network.output_range() {
        state.values[o] = fire(network, &incoming[o], &state.values);
    }
    Ok(&state.values[network.output_range()])
}

/// The allowed output index with the largest activation, ties going to the
/// smallest index. NaN never wins against a number.
pub fn select_action<T: Scalar>(outputs: &[T], allowed: &[usize]) -> usize {
    assert!(!allowed.is_empty(), "no allowed actions");
    let mut best = allowed[0];
    for &k in &allowed[1..] {
        let (v, b) = (outputs[k], outputs[best]);
        if v > b || (v == b && k < best) || (b.is_nan() && !v.is_nan()) {
            best = k;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub observation: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub terminated: bool,
}

/// A network together with its activation buffer, activation order and
/// plasticity switch.
#[derive(Clone, Debug)]
pub struct Agent<T> {
    network: Network<T>,
    incoming: Vec<Vec<usize>>,
    order: HiddenOrder,
    hebbian: HebbianConfig<T>,
    state: ActivationState<T>,
    granularity: CycleGranularity,
    observation: Vec<T>,
}

impl<T: Scalar> Agent<T> {
    /// Learning phase: random hidden order, Hebbian updates after every pass.
    pub fn plastic(network: Network<T>, eta: T, shuffle_seed: u64) -> Self {
        let state = ActivationState::new(&network, shuffle_seed);
        Agent {
            incoming: network.incoming_active(),
            observation: vec![T::zero(); network.inputs()],
            network,
            order: HiddenOrder::Random,
            hebbian: HebbianConfig::new(eta),
            state,
            granularity: CycleGranularity::default(),
        }
    }

    /// Fixed weights, scheduled activation.
    pub fn frozen(network: Network<T>, granularity: CycleGranularity, shuffle_seed: u64) -> Self {
        let state = ActivationState::new(&network, shuffle_seed);
        let schedule = ActivationSchedule::for_network(&network, granularity);
        let mut hebbian = HebbianConfig::default();
        hebbian.freeze();
        Agent {
            incoming: network.incoming_active(),
            observation: vec![T::zero(); network.inputs()],
            network,
            order: HiddenOrder::Scheduled(schedule),
            hebbian,
            state,
            granularity,
        }
    }

    pub fn with_granularity(mut self, granularity: CycleGranularity) -> Self {
        self.granularity = granularity;
        self
    }

    pub fn network(&self) -> &Network<T> {
        &self.network
    }

    pub fn into_network(self) -> Network<T> {
        self.network
    }

    pub fn phase(&self) -> Phase {
        self.order.phase()
    }

    pub fn plastic_enabled(&self) -> bool {
        self.hebbian.enabled
    }

    pub fn schedule(&self) -> Option<&ActivationSchedule> {
        match &self.order {
            HiddenOrder::Scheduled(s) => Some(s),
            HiddenOrder::Random => None,
        }
    }

    pub fn activations(&self) -> &[T] {
        self.state.values()
    }

    /// Clears the activation buffer at an episode boundary. Weights persist.
    pub fn begin_episode(&mut self) {
        self.state.reset();
    }

    pub fn forward(&mut self, observation: &[f64]) -> Result<&[T]> {
        if observation.len() != self.network.inputs() {
            return Err(Error::ObservationLength {
                expected: self.network.inputs(),
                actual: observation.len(),
            });
        }
        for (o, &x) in self.observation.iter_mut().zip(observation) {
            *o = T::of(x);
        }
        forward(
            &self.network,
            &self.incoming,
            &self.order,
            &self.observation,
            &mut self.state,
        )
    }

    /// Prunes, stops plasticity and switches to the condensed schedule.
    pub fn prune(&mut self, rate: f64, episode: usize) -> PruneEvent {
        let event = global_magnitude_prune(&mut self.network, rate, episode);
        self.hebbian.freeze();
        self.incoming = self.network.incoming_active();
        self.order = HiddenOrder::Scheduled(ActivationSchedule::for_network(&self.network, self.granularity));
        event
    }

    /// Forward pass, action choice, environment step, then one Hebbian update
    /// from the activations of that pass when plasticity is on.
    pub fn step<E: Environment + ?Sized>(&mut self, env: &mut E, observation: &[f64]) -> Result<StepRecord> {
        let allowed = env.allowed_actions();
        let action = select_action(self.forward(observation)?, &allowed);
        let t = env.step(action)?;
        if self.hebbian.enabled {
            hebbian_step(&mut self.network, &self.state.values, &self.hebbian)?;
        }
        Ok(StepRecord {
            observation: t.observation,
            action,
            reward: t.reward,
            terminated: t.terminated,
        })
    }

    /// Plays one episode and returns its total reward. `on_step` sees the
    /// observation the action was chosen from and the resulting record.
    pub fn run_episode<E: Environment + ?Sized>(
        &mut self,
        env: &mut E,
        seed: u64,
        mut on_step: impl FnMut(&[f64], &StepRecord),
    ) -> Result<f64> {
        self.begin_episode();
        let mut observation = env.reset(seed);
        let mut total = 0.0;
        loop {
            let rec = self.step(env, &observation)?;
            on_step(&observation, &rec);
            total += rec.reward;
            if rec.terminated {
                return Ok(total);
            }
            observation = rec.observation;
        }
    }
}
