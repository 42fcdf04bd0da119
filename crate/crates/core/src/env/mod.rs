//! Episodic control environments with discrete actions.
//!
//! Both tasks simulate in `f64` with the classic-control constants. Initial
//! conditions come from a caller-supplied seed so that every episode of an
//! evaluation is reproducible.

mod cartpole;
mod mountain_car;
mod remap;

pub use cartpole::{CartPole, CartPoleState};
pub use mountain_car::{MountainCar, MountainCarState};
pub use remap::{wrap_remapped, RemapSpec, Remapped};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub observation_dim: usize,
    pub action_count: usize,
    pub max_steps: usize,
    /// Mean episode reward over 100 episodes at which the task counts as solved.
    pub solve_threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// Episode over, whether by failure, success or the step limit.
    pub terminated: bool,
}

pub trait Environment {
    fn spec(&self) -> EnvironmentSpec;

    /// Starts a new episode from initial conditions drawn with `seed`.
    fn reset(&mut self, seed: u64) -> Vec<f64>;

    fn step(&mut self, action: usize) -> Result<Transition>;

    /// Network output indices the agent may choose from, in action order.
    fn allowed_actions(&self) -> Vec<usize> {
        (0..self.spec().action_count).collect()
    }
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn spec(&self) -> EnvironmentSpec {
        (**self).spec()
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        (**self).reset(seed)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        (**self).step(action)
    }

    fn allowed_actions(&self) -> Vec<usize> {
        (**self).allowed_actions()
    }
}

/// Tasks with a native implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    CartPole,
    MountainCar,
}

impl Task {
    pub fn spec(self) -> EnvironmentSpec {
        match self {
            Task::CartPole => CartPole::SPEC,
            Task::MountainCar => MountainCar::SPEC,
        }
    }

    pub fn make(self) -> Box<dyn Environment + Send> {
        match self {
            Task::CartPole => Box::new(CartPole::new()),
            Task::MountainCar => Box::new(MountainCar::new()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::CartPole => "cartpole",
            Task::MountainCar => "mountaincar",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "cartpole" => Ok(Task::CartPole),
            "mountaincar" => Ok(Task::MountainCar),
            _ => Err(Error::UnknownTask(s.to_string())),
        }
    }
}
