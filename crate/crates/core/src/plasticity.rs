//! Per-connection ABCD Hebbian updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::scalar::Scalar;

/// Default learning rate. A conventional choice for ABCD rules, not a value
/// taken from any reported experiment.
pub const DEFAULT_ETA: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HebbianConfig<T> {
    pub eta: T,
    pub enabled: bool,
}

impl<T: Scalar> HebbianConfig<T> {
    pub fn new(eta: T) -> Self {
        HebbianConfig { eta, enabled: true }
    }

    /// Turns plasticity off for good; called when pruning fires.
    pub fn freeze(&mut self) {
        self.enabled = false;
    }
}

impl<T: Scalar> Default for HebbianConfig<T> {
    fn default() -> Self {
        HebbianConfig::new(T::of(DEFAULT_ETA))
    }
}

/// Applies `w += eta * (A*a_pre + B*a_post + C*a_pre*a_post + D)` to every
/// active connection.
///
/// `activations` is indexed by node and is read-only for the whole step, so
/// the result does not depend on the order in which connections are visited.
pub fn hebbian_step<T: Scalar>(network: &mut Network<T>, activations: &[T], config: &HebbianConfig<T>) -> Result<()> {
    if !config.enabled {
        return Err(Error::PlasticityDisabled);
    }
    if activations.len() != network.node_count() {
        return Err(Error::InvalidDimension(format!(
            "activation buffer has {} entries for {} nodes",
            activations.len(),
            network.node_count()
        )));
    }
    let eta = config.eta;
    for c in network.connections_mut().iter_mut().filter(|c| c.active) {
        let pre = activations[c.src.index];
        let post = activations[c.dst.index];
        c.weight += eta * c.abcd.delta(pre, post);
    }
    Ok(())
}
