//! Self-building neural networks.
//!
//! A dense recurrent network grows its weights with per-connection ABCD
//! Hebbian rules, is pruned by global weight magnitude partway through its
//! lifetime, and then runs as a frozen, acyclic-scheduled controller. The rule
//! coefficients are found by CMA-ES on classic control tasks.

pub mod activation;
pub mod cmaes;
pub mod condensation;
pub mod document;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod network;
pub mod plasticity;
pub mod pruning;
pub mod scalar;
pub mod seed;

pub use activation::{select_action, Agent, HiddenOrder, Phase};
pub use cmaes::CmaEs;
pub use condensation::{
    remove_cycles, topological_schedule, ActivationSchedule, CondensedGraph, CycleGranularity, Digraph,
};
pub use document::{load_network, NetworkDocument};
pub use env::{Environment, EnvironmentSpec, RemapSpec, Task, Transition};
pub use error::{Error, Result};
pub use harness::{
    analysis_report, evaluate_ffnn, evaluate_sbnn, run_experiment, validate_transfer, ExperimentConfig, RunRecord,
};
pub use network::{Abcd, Connection, ModelKind, Network, NodeId, NodeKind};
pub use plasticity::{hebbian_step, HebbianConfig};
pub use pruning::{classify_structure, global_magnitude_prune, working_connections, PruneEvent, StructureClass};
pub use scalar::Scalar;

/// Double-precision network, the default for experiments.
pub type NetworkF64 = Network<f64>;
/// Single-precision network.
pub type NetworkF32 = Network<f32>;
pub type AgentF64 = Agent<f64>;
pub type AgentF32 = Agent<f32>;
pub type CmaEsF64 = CmaEs<f64>;
pub type CmaEsF32 = CmaEs<f32>;
