//! JSON form of a network, used for evolved-network files.
//!
//! ```json
//! {"kind": "sbnn", "I": 4, "H": 3, "O": 2,
//!  "connections": [{"src": 0, "dst": 4, "weight": 0.7, "abcd": [0.1, 0.0, 0.3, -0.2], "active": true}],
//!  "schedule": [4, [5, 6]]}
//! ```
//!
//! Node indices follow the network layout: inputs, then hidden, then outputs.
//! `schedule` is optional and informational; loading rebuilds it from the
//! active connections.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::condensation::ActivationSchedule;
use crate::error::{Error, Result};
use crate::network::{Abcd, Connection, ModelKind, Network};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConnectionDocument<T> {
    pub src: usize,
    pub dst: usize,
    pub weight: T,
    pub abcd: Abcd<T>,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetworkDocument<T> {
    pub kind: ModelKind,
    #[serde(rename = "I")]
    pub inputs: usize,
    #[serde(rename = "H")]
    pub hidden: usize,
    #[serde(rename = "O")]
    pub outputs: usize,
    pub connections: Vec<ConnectionDocument<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ActivationSchedule>,
}

impl<T: Scalar> NetworkDocument<T> {
    pub fn from_network(network: &Network<T>, schedule: Option<ActivationSchedule>) -> Self {
        NetworkDocument {
            kind: network.kind(),
            inputs: network.inputs(),
            hidden: network.hidden(),
            outputs: network.outputs(),
            connections: network
                .connections()
                .iter()
                .map(|c| ConnectionDocument {
                    src: c.src.index,
                    dst: c.dst.index,
                    weight: c.weight,
                    abcd: c.abcd,
                    active: c.active,
                })
                .collect(),
            schedule,
        }
    }

    /// Rebuilds and validates the network.
    pub fn to_network(&self) -> Result<Network<T>> {
        let layout = Network::<T>::from_parts(self.kind, self.inputs, self.hidden, self.outputs, Vec::new())?;
        let n = layout.node_count();
        let mut connections = Vec::with_capacity(self.connections.len());
        for c in &self.connections {
            if c.src >= n || c.dst >= n {
                return Err(Error::InvalidDimension(format!(
                    "connection {}->{} references a node outside 0..{n}",
                    c.src, c.dst
                )));
            }
            if !c.weight.is_finite() {
                return Err(Error::Numerical(format!(
                    "connection {}->{} has a non-finite weight",
                    c.src, c.dst
                )));
            }
            connections.push(Connection {
                src: layout.node(c.src),
                dst: layout.node(c.dst),
                weight: c.weight,
                abcd: c.abcd,
                active: c.active,
            });
        }
        Network::from_parts(self.kind, self.inputs, self.hidden, self.outputs, connections)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Reads a network file and validates it.
pub fn load_network<T: Scalar>(path: &Path) -> Result<Network<T>> {
    NetworkDocument::load(path)?.to_network()
}
