use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Environment, EnvironmentSpec, Transition};
use crate::error::{Error, Result};

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const TOTAL_MASS: f64 = CART_MASS + POLE_MASS;
/// Half the pole length.
const HALF_LENGTH: f64 = 0.5;
const POLE_MASS_LENGTH: f64 = POLE_MASS * HALF_LENGTH;
const FORCE_MAG: f64 = 10.0;
/// Seconds per explicit Euler step.
const TAU: f64 = 0.02;
const THETA_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
const X_LIMIT: f64 = 2.4;
const INIT_SPREAD: f64 = 0.05;

/// `[x, x_dot, theta, theta_dot]` in metres, m/s, radians, rad/s.
pub type CartPoleState = [f64; 4];

/// Pole balancing on a cart. Action 0 pushes left, 1 pushes right; every step
/// survived (including the failing one) earns +1.
#[derive(Clone, Debug)]
pub struct CartPole {
    state: CartPoleState,
    steps: usize,
    done: bool,
}

impl Default for CartPole {
    fn default() -> Self {
        CartPole::new()
    }
}

impl CartPole {
    pub const SPEC: EnvironmentSpec = EnvironmentSpec {
        observation_dim: 4,
        action_count: 2,
        max_steps: 500,
        solve_threshold: 475.0,
    };

    pub fn new() -> Self {
        CartPole {
            state: [0.0; 4],
            steps: 0,
            done: false,
        }
    }

    /// Starts an episode from an explicit state.
    pub fn with_state(state: CartPoleState) -> Self {
        CartPole {
            state,
            steps: 0,
            done: false,
        }
    }

    pub fn state(&self) -> CartPoleState {
        self.state
    }

    fn advance(s: CartPoleState, action: usize) -> CartPoleState {
        let [x, x_dot, theta, theta_dot] = s;
        let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };
        let (sin, cos) = theta.sin_cos();
        let temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin) / TOTAL_MASS;
        let theta_acc = (GRAVITY * sin - cos * temp) / (HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / TOTAL_MASS));
        let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos / TOTAL_MASS;
        [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ]
    }
}

impl Environment for CartPole {
    fn spec(&self) -> EnvironmentSpec {
        Self::SPEC
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut self.state {
            *v = rng.random_range(-INIT_SPREAD..INIT_SPREAD);
        }
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
        let [x, _, theta, _] = self.state;
        let failed = !(-X_LIMIT..=X_LIMIT).contains(&x) || !(-THETA_LIMIT..=THETA_LIMIT).contains(&theta);
        self.done = failed || self.steps >= Self::SPEC.max_steps;
        Ok(Transition {
            observation: self.state.to_vec(),
            reward: 1.0,
            terminated: self.done,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn past_angle_limit_terminates_with_reward() {
        let mut env = CartPole::with_state([0.0, 0.0, THETA_LIMIT + 1e-3, 0.5]);
        let t = env.step(1).unwrap();
        assert!(t.terminated);
        assert_eq!(t.reward, 1.0);
        assert!(matches!(env.step(0), Err(Error::EpisodeFinished)));
    }

    #[test]
    fn invalid_action() {
        let mut env = CartPole::new();
        env.reset(0);
        assert!(matches!(env.step(2), Err(Error::InvalidAction { action: 2, count: 2 })));
    }

    #[test]
    fn reset_is_seeded() {
        let mut a = CartPole::new();
        let mut b = CartPole::new();
        assert_eq!(a.reset(9), b.reset(9));
        assert_ne!(a.reset(9), a.reset(10));
        assert!(a.state().iter().all(|v| v.abs() <= INIT_SPREAD));
    }

    #[test]
    fn step_limit_ends_episode() {
        // Balancing by pushing against the pole's lean survives the full limit.
        let mut env = CartPole::new();
        let mut obs = env.reset(1);
        let mut total = 0.0;
        loop {
            let action = usize::from(obs[2] + 0.5 * obs[3] > 0.0);
            let t = env.step(action).unwrap();
            total += t.reward;
            obs = t.observation;
            if t.terminated {
                break;
            }
        }
        assert_eq!(total, 500.0);
    }
}
