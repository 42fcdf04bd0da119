//! Node and connection types plus the two network topologies.
//!
//! Nodes are numbered inputs first, then hidden nodes, then outputs:
//! `0..I` are inputs, `I..I+H` hidden, `I+H..I+H+O` outputs. Connections are
//! kept sorted by `(src, dst)` index, which is also the genome order.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Input,
    Hidden,
    Output,
    /// Placeholder for a condensed cycle. Never part of a built topology.
    Fake,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub index: usize,
    pub kind: NodeKind,
}

impl NodeId {
    pub const fn new(index: usize, kind: NodeKind) -> Self {
        NodeId { index, kind }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Dense plastic network grown by per-connection ABCD rules.
    Sbnn,
    /// Single-hidden-layer feed-forward baseline with evolved weights.
    Ffnn,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Sbnn => "sbnn",
            ModelKind::Ffnn => "ffnn",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sbnn" => Ok(ModelKind::Sbnn),
            "ffnn" => Ok(ModelKind::Ffnn),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Coefficients of the Hebbian rule `dw = eta * (A*pre + B*post + C*pre*post + D)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 4]", into = "[T; 4]")]
#[serde(bound = "T: Scalar")]
pub struct Abcd<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Abcd<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Abcd { a, b, c, d }
    }

    pub fn zero() -> Self {
        Abcd::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Rule output for one pre/post activation pair, before scaling by eta.
    #[inline]
    pub fn delta(&self, pre: T, post: T) -> T {
        self.a * pre + self.b * post + self.c * pre * post + self.d
    }
}

impl<T> From<[T; 4]> for Abcd<T> {
    fn from([a, b, c, d]: [T; 4]) -> Self {
        Abcd { a, b, c, d }
    }
}

impl<T> From<Abcd<T>> for [T; 4] {
    fn from(r: Abcd<T>) -> Self {
        [r.a, r.b, r.c, r.d]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection<T> {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: T,
    pub abcd: Abcd<T>,
    /// `false` once the connection has been pruned.
    pub active: bool,
}

/// Number of connections of the dense topology: `H^2 + H(I+O) + I*O`.
///
/// The `H^2` term is the full hidden block, recurrent self-links included.
pub fn sbnn_connection_count(inputs: usize, hidden: usize, outputs: usize) -> usize {
    hidden * hidden + hidden * (inputs + outputs) + inputs * outputs
}

pub fn ffnn_connection_count(inputs: usize, hidden: usize, outputs: usize) -> usize {
    inputs * hidden + hidden * outputs
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    kind: ModelKind,
    inputs: usize,
    hidden: usize,
    outputs: usize,
    connections: Vec<Connection<T>>,
}

impl<T: Scalar> Network<T> {
    /// Dense topology: inputs feed every hidden node and every output, hidden
    /// nodes are fully connected among themselves and feed every output.
    ///
    /// The hidden block is the full `H x H` matrix, so each hidden node also
    /// carries a recurrent self-link (it reads its own previous activation).
    /// This is what makes the count equal `H^2 + H(I+O) + I*O`. All weights
    /// start at zero.
    pub fn sbnn(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        check_io(inputs, outputs)?;
        let mut net = Network::empty(ModelKind::Sbnn, inputs, hidden, outputs);
        for src in 0..net.node_count() {
            let src_id = net.node(src);
            for dst in 0..net.node_count() {
                let dst_id = net.node(dst);
                let wired = matches!(
                    (src_id.kind, dst_id.kind),
                    (NodeKind::Input | NodeKind::Hidden, NodeKind::Hidden | NodeKind::Output)
                );
                if wired {
                    net.connections.push(Connection::dormant(src_id, dst_id));
                }
            }
        }
        Ok(net)
    }

    /// One hidden layer: `input -> hidden -> output`, no skip links.
    pub fn ffnn(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        check_io(inputs, outputs)?;
        if hidden == 0 {
            return Err(Error::InvalidDimension(
                "a feed-forward network needs at least one hidden node".into(),
            ));
        }
        let mut net = Network::empty(ModelKind::Ffnn, inputs, hidden, outputs);
        for src in net.input_range() {
            for dst in net.hidden_range() {
                net.connections.push(Connection::dormant(net.node(src), net.node(dst)));
            }
        }
        for src in net.hidden_range() {
            for dst in net.output_range() {
                net.connections.push(Connection::dormant(net.node(src), net.node(dst)));
            }
        }
        Ok(net)
    }

    pub fn build(kind: ModelKind, inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        match kind {
            ModelKind::Sbnn => Network::sbnn(inputs, hidden, outputs),
            ModelKind::Ffnn => Network::ffnn(inputs, hidden, outputs),
        }
    }

    /// Assembles a network from explicit connections, e.g. when loading a
    /// saved document. Connections are re-sorted into canonical order.
    pub fn from_parts(
        kind: ModelKind,
        inputs: usize,
        hidden: usize,
        outputs: usize,
        mut connections: Vec<Connection<T>>,
    ) -> Result<Self> {
        check_io(inputs, outputs)?;
        let net = Network::empty(kind, inputs, hidden, outputs);
        for c in &connections {
            let n = net.node_count();
            if c.src.index >= n || c.dst.index >= n {
                return Err(Error::InvalidDimension(format!(
                    "connection {}->{} references a node outside 0..{n}",
                    c.src.index, c.dst.index
                )));
            }
            if c.src.index == c.dst.index && c.src.kind != NodeKind::Hidden {
                return Err(Error::InvalidDimension(format!(
                    "self-loop on non-hidden node {}",
                    c.src.index
                )));
            }
            if net.node(c.src.index) != c.src || net.node(c.dst.index) != c.dst {
                return Err(Error::InvalidDimension(format!(
                    "connection {}->{} has node kinds inconsistent with the layout",
                    c.src.index, c.dst.index
                )));
            }
        }
        connections.sort_by_key(|c| (c.src.index, c.dst.index));
        if connections
            .windows(2)
            .any(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst))
        {
            return Err(Error::InvalidDimension("duplicate connection".into()));
        }
        Ok(Network { connections, ..net })
    }

    fn empty(kind: ModelKind, inputs: usize, hidden: usize, outputs: usize) -> Self {
        Network {
            kind,
            inputs,
            hidden,
            outputs,
            connections: Vec::new(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn node_count(&self) -> usize {
        self.inputs + self.hidden + self.outputs
    }

    pub fn input_range(&self) -> Range<usize> {
        0..self.inputs
    }

    pub fn hidden_range(&self) -> Range<usize> {
        self.inputs..self.inputs + self.hidden
    }

    pub fn output_range(&self) -> Range<usize> {
        self.inputs + self.hidden..self.node_count()
    }

    /// Identifies node `index`. Panics if the index is out of range.
    pub fn node(&self, index: usize) -> NodeId {
        let kind = if index < self.inputs {
            NodeKind::Input
        } else if index < self.inputs + self.hidden {
            NodeKind::Hidden
        } else if index < self.node_count() {
            NodeKind::Output
        } else {
            panic!("node index {index} out of range 0..{}", self.node_count())
        };
        NodeId::new(index, kind)
    }

    pub fn connections(&self) -> &[Connection<T>] {
        &self.connections
    }

    pub fn connections_mut(&mut self) -> &mut [Connection<T>] {
        &mut self.connections
    }

    pub fn active_count(&self) -> usize {
        self.connections.iter().filter(|c| c.active).count()
    }

    /// Indices of the active connections entering each node.
    pub fn incoming_active(&self) -> Vec<Vec<usize>> {
        let mut incoming = vec![Vec::new(); self.node_count()];
        for (k, c) in self.connections.iter().enumerate() {
            if c.active {
                incoming[c.dst.index].push(k);
            }
        }
        incoming
    }

    /// Parameters evolved per connection: four rule coefficients for the
    /// plastic network, one weight for the baseline.
    pub fn genome_length(&self) -> usize {
        match self.kind {
            ModelKind::Sbnn => 4 * self.connections.len(),
            ModelKind::Ffnn => self.connections.len(),
        }
    }

    /// Writes a genome onto the network in canonical connection order.
    ///
    /// For the plastic model the genome is consumed in `(A, B, C, D)` blocks
    /// and weights are left untouched; for the baseline it sets weights.
    pub fn apply_genome(&mut self, genome: &[T]) -> Result<()> {
        let expected = self.genome_length();
        if genome.len() != expected {
            return Err(Error::GenomeLength {
                expected,
                actual: genome.len(),
            });
        }
        match self.kind {
            ModelKind::Sbnn => {
                for (c, block) in self.connections.iter_mut().zip(genome.chunks_exact(4)) {
                    c.abcd = Abcd::new(block[0], block[1], block[2], block[3]);
                }
            }
            ModelKind::Ffnn => {
                for (c, &w) in self.connections.iter_mut().zip(genome) {
                    c.weight = w;
                }
            }
        }
        Ok(())
    }

    pub fn with_genome(mut self, genome: &[T]) -> Result<Self> {
        self.apply_genome(genome)?;
        Ok(self)
    }

    /// Inverse of [`Network::apply_genome`].
    pub fn extract_genome(&self) -> Vec<T> {
        match self.kind {
            ModelKind::Sbnn => self.connections.iter().flat_map(|c| <[T; 4]>::from(c.abcd)).collect(),
            ModelKind::Ffnn => self.connections.iter().map(|c| c.weight).collect(),
        }
    }

    pub fn weights(&self) -> Vec<T> {
        self.connections.iter().map(|c| c.weight).collect()
    }
}

impl<T: Scalar> Connection<T> {
    fn dormant(src: NodeId, dst: NodeId) -> Self {
        Connection {
            src,
            dst,
            weight: T::zero(),
            abcd: Abcd::zero(),
            active: true,
        }
    }
}

fn check_io(inputs: usize, outputs: usize) -> Result<()> {
    if inputs == 0 || outputs == 0 {
        return Err(Error::InvalidDimension(format!(
            "need at least one input and one output (got I={inputs}, O={outputs})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sbnn_counts_from_examples() {
        let net = Network::<f64>::sbnn(2, 3, 3).unwrap();
        assert_eq!(net.connections().len(), 30);
        let hh = net
            .connections()
            .iter()
            .filter(|c| c.src.kind == NodeKind::Hidden && c.dst.kind == NodeKind::Hidden)
            .count();
        // The full 3x3 hidden block: both directions of each pair plus self-links.
        assert_eq!(hh, 9);
        let selfs = net.connections().iter().filter(|c| c.src == c.dst).count();
        assert_eq!(selfs, 3);
        assert_eq!(Network::<f64>::sbnn(1, 0, 1).unwrap().connections().len(), 1);
        assert_eq!(Network::<f64>::sbnn(8, 5, 4).unwrap().connections().len(), 117);
    }

    #[test]
    fn ffnn_counts_from_examples() {
        assert_eq!(Network::<f64>::ffnn(8, 9, 4).unwrap().connections().len(), 108);
        assert_eq!(Network::<f64>::ffnn(1, 1, 1).unwrap().connections().len(), 2);
        // Enumerated: 2*4 input->hidden plus 4*3 hidden->output.
        let mut manual = 0;
        for _ in 0..2 {
            for _ in 0..4 {
                manual += 1;
            }
        }
        for _ in 0..4 {
            for _ in 0..3 {
                manual += 1;
            }
        }
        assert_eq!(Network::<f64>::ffnn(2, 4, 3).unwrap().connections().len(), manual);
    }

    #[test]
    fn invalid_dimensions() {
        assert!(matches!(Network::<f64>::sbnn(0, 3, 1), Err(Error::InvalidDimension(_))));
        assert!(matches!(Network::<f64>::sbnn(1, 3, 0), Err(Error::InvalidDimension(_))));
        assert!(Network::<f64>::ffnn(1, 0, 1).is_err());
    }

    #[test]
    fn genome_lengths() {
        assert_eq!(Network::<f64>::sbnn(2, 3, 3).unwrap().genome_length(), 120);
        assert_eq!(Network::<f64>::ffnn(8, 9, 4).unwrap().genome_length(), 108);
        assert_eq!(Network::<f64>::sbnn(1, 0, 1).unwrap().genome_length(), 4);
    }

    #[test]
    fn apply_genome_examples() {
        let net = Network::<f64>::sbnn(2, 3, 3).unwrap();
        let net = net.with_genome(&[0.0; 120]).unwrap();
        assert!(net
            .connections()
            .iter()
            .all(|c| c.abcd == Abcd::zero() && c.weight == 0.0));

        let net = Network::<f64>::ffnn(1, 1, 1)
            .unwrap()
            .with_genome(&[0.5, -0.25])
            .unwrap();
        assert_eq!(net.connections()[0].weight, 0.5);
        assert_eq!((net.connections()[0].src.index, net.connections()[0].dst.index), (0, 1));
        assert_eq!(net.connections()[1].weight, -0.25);
        assert_eq!((net.connections()[1].src.index, net.connections()[1].dst.index), (1, 2));

        let net = Network::<f64>::sbnn(1, 0, 1)
            .unwrap()
            .with_genome(&[1.0, 2.0, 3.0, 4.0])
            .unwrap();
        assert_eq!(net.connections()[0].abcd, Abcd::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(net.connections()[0].weight, 0.0);
    }

    #[test]
    fn genome_length_mismatch() {
        let mut net = Network::<f64>::sbnn(1, 0, 1).unwrap();
        assert!(matches!(
            net.apply_genome(&[1.0, 2.0]),
            Err(Error::GenomeLength { expected: 4, actual: 2 })
        ));
    }

    #[test]
    fn canonical_order_is_sorted_and_stable() {
        let a = Network::<f32>::sbnn(3, 4, 2).unwrap();
        let b = Network::<f32>::sbnn(3, 4, 2).unwrap();
        assert_eq!(a, b);
        let keys: Vec<_> = a.connections().iter().map(|c| (c.src.index, c.dst.index)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn connection_count_grid() {
        for h in 0..=12 {
            for i in 1..=8 {
                for o in 1..=8 {
                    let net = Network::<f64>::sbnn(i, h, o).unwrap();
                    assert_eq!(net.connections().len(), h * h + h * (i + o) + i * o);
                    assert!(net
                        .connections()
                        .iter()
                        .all(|c| (c.src != c.dst || c.src.kind == NodeKind::Hidden) && c.weight == 0.0 && c.active));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn genome_round_trip(i in 1usize..5, h in 0usize..5, o in 1usize..4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for kind in [ModelKind::Sbnn, ModelKind::Ffnn] {
                if kind == ModelKind::Ffnn && h == 0 {
                    continue;
                }
                let mut net = Network::<f64>::build(kind, i, h, o).unwrap();
                let genome: Vec<f64> = (0..net.genome_length()).map(|_| rng.random_range(-5.0..5.0)).collect();
                net.apply_genome(&genome).unwrap();
                prop_assert_eq!(net.extract_genome(), genome);
            }
        }
    }
}
