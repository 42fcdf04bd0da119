use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Environment, EnvironmentSpec, Transition};
use crate::error::{Error, Result};

const MIN_POSITION: f64 = -1.2;
const MAX_POSITION: f64 = 0.6;
const MAX_SPEED: f64 = 0.07;
const GOAL_POSITION: f64 = 0.5;
const FORCE: f64 = 0.001;
const GRAVITY: f64 = 0.0025;

/// `[position, velocity]`.
pub type MountainCarState = [f64; 2];

/// Under-powered car in a valley. Actions: 0 accelerate left, 1 coast,
/// 2 accelerate right. Each step costs -1 until the car reaches the flag.
#[derive(Clone, Debug)]
pub struct MountainCar {
    state: MountainCarState,
    steps: usize,
    done: bool,
}

impl Default for MountainCar {
    fn default() -> Self {
        MountainCar::new()
    }
}

impl MountainCar {
    pub const SPEC: EnvironmentSpec = EnvironmentSpec {
        observation_dim: 2,
        action_count: 3,
        max_steps: 200,
        solve_threshold: -110.0,
    };

    pub fn new() -> Self {
        MountainCar {
            state: [-0.5, 0.0],
            steps: 0,
            done: false,
        }
    }

    pub fn with_state(state: MountainCarState) -> Self {
        MountainCar {
            state,
            steps: 0,
            done: false,
        }
    }

    pub fn state(&self) -> MountainCarState {
        self.state
    }

    fn advance([position, velocity]: MountainCarState, action: usize) -> MountainCarState {
        let mut v = velocity + (action as f64 - 1.0) * FORCE - (3.0 * position).cos() * GRAVITY;
        v = v.clamp(-MAX_SPEED, MAX_SPEED);
        let p = (position + v).clamp(MIN_POSITION, MAX_POSITION);
        if p == MIN_POSITION && v < 0.0 {
            v = 0.0;
        }
        [p, v]
    }
}

impl Environment for MountainCar {
    fn spec(&self) -> EnvironmentSpec {
        Self::SPEC
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.state = [rng.random_range(-0.6..-0.4), 0.0];
        self.steps = 0;
        self.done = false;
        self.state.to_vec()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        if action >= Self::SPEC.action_count {
            return Err(Error::InvalidAction {
                action,
                count: Self::SPEC.action_count,
            });
        }
        if self.done {
            return Err(Error::EpisodeFinished);
        }
        self.state = Self::advance(self.state, action);
        self.steps += 1;
        // The car can only first cross the goal moving right, so the usual
        // non-negative velocity condition is implied.
        let reached = self.state[0] >= GOAL_POSITION;
        self.done = reached || self.steps >= Self::SPEC.max_steps;
        Ok(Transition {
            observation: self.state.to_vec(),
            reward: -1.0,
            terminated: self.done,
        })
    }
}
