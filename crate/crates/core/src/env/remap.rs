use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Environment, EnvironmentSpec, Transition};
use crate::error::{Error, Result};

/// How a task's observations and actions map onto a network trained with a
/// different interface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemapSpec {
    /// `(observation slot, network input index)` pairs. Inputs not listed
    /// receive 0.
    pub input_map: Vec<(usize, usize)>,
    /// Network outputs standing for the task's actions, in action order.
    pub output_map: Vec<usize>,
}

impl RemapSpec {
    pub fn identity(observation_dim: usize, action_count: usize) -> Self {
        RemapSpec {
            input_map: (0..observation_dim).map(|k| (k, k)).collect(),
            output_map: (0..action_count).collect(),
        }
    }

    /// Cart Pole driven by a Lunar Lander network.
    ///
    /// Lander inputs: x, y, vx, vy, angle, angular velocity, two leg
    /// contacts. Lander actions: no-op, left engine, main engine, right engine.
    pub fn lander_to_cartpole() -> Self {
        RemapSpec {
            input_map: vec![(0, 0), (1, 2), (2, 4), (3, 5)],
            output_map: vec![1, 3],
        }
    }

    /// Mountain Car driven by a Lunar Lander network; "coast" is the no-op.
    pub fn lander_to_mountaincar() -> Self {
        RemapSpec {
            input_map: vec![(0, 0), (1, 2)],
            output_map: vec![1, 0, 3],
        }
    }

    /// Preset by name: `lander-cartpole` or `lander-mountaincar`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "lander-cartpole" => Some(Self::lander_to_cartpole()),
            "lander-mountaincar" => Some(Self::lander_to_mountaincar()),
            _ => None,
        }
    }

    fn validate(&self, target: &EnvironmentSpec, network_inputs: usize, network_outputs: usize) -> Result<()> {
        if self.input_map.len() != target.observation_dim {
            return Err(Error::Remap(format!(
                "input map has {} entries, task observes {}",
                self.input_map.len(),
                target.observation_dim
            )));
        }
        let slots: BTreeSet<usize> = self.input_map.iter().map(|&(s, _)| s).collect();
        let targets: BTreeSet<usize> = self.input_map.iter().map(|&(_, t)| t).collect();
        if slots.len() != self.input_map.len() || targets.len() != self.input_map.len() {
            return Err(Error::Remap("input map is not injective".into()));
        }
        if let Some(&s) = slots.iter().find(|&&s| s >= target.observation_dim) {
            return Err(Error::Remap(format!("observation slot {s} out of range")));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= network_inputs) {
            return Err(Error::Remap(format!(
                "network input {t} out of range for {network_inputs} inputs"
            )));
        }
        if self.output_map.len() != target.action_count {
            return Err(Error::Remap(format!(
                "output map has {} entries, task has {} actions",
                self.output_map.len(),
                target.action_count
            )));
        }
        let outs: BTreeSet<usize> = self.output_map.iter().copied().collect();
        if outs.len() != self.output_map.len() {
            return Err(Error::Remap("output map repeats an output".into()));
        }
        if let Some(&o) = outs.iter().find(|&&o| o >= network_outputs) {
            return Err(Error::Remap(format!(
                "network output {o} out of range for {network_outputs} outputs"
            )));
        }
        Ok(())
    }
}

/// A task seen through a network's interface: observations are scattered
/// into a network-sized vector and actions are picked among `output_map`.
#[derive(Clone, Debug)]
pub struct Remapped<E> {
    inner: E,
    remap: RemapSpec,
    network_inputs: usize,
    network_outputs: usize,
}

impl<E: Environment> Remapped<E> {
    pub fn new(inner: E, network_inputs: usize, network_outputs: usize, remap: RemapSpec) -> Result<Self> {
        remap.validate(&inner.spec(), network_inputs, network_outputs)?;
        Ok(Remapped {
            inner,
            remap,
            network_inputs,
            network_outputs,
        })
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    fn scatter(&self, observation: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.network_inputs];
        for &(slot, idx) in &self.remap.input_map {
            v[idx] = observation[slot];
        }
        v
    }
}

pub fn wrap_remapped<E: Environment>(
    network_inputs: usize,
    network_outputs: usize,
    target: E,
    remap: RemapSpec,
) -> Result<Remapped<E>> {
    Remapped::new(target, network_inputs, network_outputs, remap)
}

impl<E: Environment> Environment for Remapped<E> {
    fn spec(&self) -> EnvironmentSpec {
        EnvironmentSpec {
            observation_dim: self.network_inputs,
            action_count: self.network_outputs,
            ..self.inner.spec()
        }
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let obs = self.inner.reset(seed);
        self.scatter(&obs)
    }

    /// `action` is a network output index; it must be one of `output_map`.
    fn step(&mut self, action: usize) -> Result<Transition> {
        let Some(position) = self.remap.output_map.iter().position(|&o| o == action) else {
            return Err(Error::InvalidAction {
                action,
                count: self.network_outputs,
            });
        };
        let t = self.inner.step(position)?;
        Ok(Transition {
            observation: self.scatter(&t.observation),
            ..t
        })
    }

    fn allowed_actions(&self) -> Vec<usize> {
        self.remap.output_map.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CartPole, MountainCar};

    #[test]
    fn scatter_with_zero_fill() {
        let remap = RemapSpec {
            input_map: vec![(0, 0), (1, 2)],
            output_map: vec![0, 1, 2],
        };
        let mut env = Remapped::new(MountainCar::new(), 8, 4, remap).unwrap();
        let obs = env.reset(5);
        let raw = env.inner().state();
        assert_eq!(obs, vec![raw[0], 0.0, raw[1], 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn actions_translate_to_positions() {
        let mut env = Remapped::new(CartPole::new(), 8, 4, RemapSpec::lander_to_cartpole()).unwrap();
        env.reset(1);
        assert_eq!(env.allowed_actions(), vec![1, 3]);
        let before = env.inner().state();
        env.step(3).unwrap();
        let mut reference = CartPole::with_state(before);
        reference.step(1).unwrap();
        assert_eq!(env.inner().state(), reference.state());
        assert!(matches!(env.step(0), Err(Error::InvalidAction { .. })));
    }

    #[test]
    fn rejects_bad_maps() {
        let wrong_len = RemapSpec {
            input_map: vec![(0, 0)],
            output_map: vec![0, 1, 2],
        };
        assert!(Remapped::new(MountainCar::new(), 8, 4, wrong_len).is_err());
        let too_few_actions = RemapSpec {
            input_map: vec![(0, 0), (1, 1)],
            output_map: vec![0, 1],
        };
        assert!(Remapped::new(MountainCar::new(), 8, 4, too_few_actions).is_err());
        let collide = RemapSpec {
            input_map: vec![(0, 3), (1, 3)],
            output_map: vec![0, 1, 2],
        };
        assert!(Remapped::new(MountainCar::new(), 8, 4, collide).is_err());
        let out_of_range = RemapSpec {
            input_map: vec![(0, 0), (1, 9)],
            output_map: vec![0, 1, 2],
        };
        assert!(Remapped::new(MountainCar::new(), 8, 4, out_of_range).is_err());
        assert!(Remapped::new(MountainCar::new(), 8, 2, RemapSpec::lander_to_mountaincar()).is_err());
    }

    #[test]
    fn presets_fit_lander_shape() {
        assert!(Remapped::new(CartPole::new(), 8, 4, RemapSpec::preset("lander-cartpole").unwrap()).is_ok());
        assert!(Remapped::new(
            MountainCar::new(),
            8,
            4,
            RemapSpec::preset("lander-mountaincar").unwrap()
        )
        .is_ok());
        assert!(RemapSpec::preset("nope").is_none());
    }
}
