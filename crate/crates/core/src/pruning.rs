//! Global magnitude pruning and the post-pruning structure analysis.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::condensation::{remove_cycles, CycleGranularity, Digraph};
use crate::network::{Network, NodeId, NodeKind};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneEvent {
    /// Episode after which pruning fired; 0 means before the first episode.
    pub episode: usize,
    pub rate: f64,
    /// Magnitude of the largest pruned weight, 0 when nothing was pruned.
    pub threshold: f64,
    pub removed: usize,
}

/// Number of connections a rate of `rate` percent removes out of `total`.
pub fn prune_count(rate: f64, total: usize) -> usize {
    let k = (rate * total as f64 / 100.0).floor();
    (k.max(0.0) as usize).min(total)
}

/// Deactivates the `floor(rate * C / 100)` connections of smallest absolute
/// weight, `C` being the total connection count.
///
/// Equal magnitudes are pruned in canonical connection order. Connections that
/// are already inactive count toward the quota, so pruning twice at the same
/// rate removes nothing the second time.
pub fn global_magnitude_prune<T: Scalar>(network: &mut Network<T>, rate: f64, episode: usize) -> PruneEvent {
    assert!((0.0..=100.0).contains(&rate), "pruning rate {rate} outside [0, 100]");
    let total = network.connections().len();
    let target = prune_count(rate, total);
    let already = total - network.active_count();
    let quota = target.saturating_sub(already);

    let mut candidates: Vec<usize> = network
        .connections()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.active)
        .map(|(k, _)| k)
        .collect();
    // Stable sort keeps canonical order among equal magnitudes.
    candidates.sort_by(|&x, &y| {
        let wx = network.connections()[x].weight.abs();
        let wy = network.connections()[y].weight.abs();
        wx.partial_cmp(&wy).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut threshold = T::zero();
    for &k in candidates.iter().take(quota) {
        let c = &mut network.connections_mut()[k];
        c.active = false;
        threshold = threshold.max(c.weight.abs());
    }
    PruneEvent {
        episode,
        rate,
        threshold: threshold.to_f64_lossy(),
        removed: quota,
    }
}

/// Indices of the active connections that lie on some input-to-output route.
///
/// This is the fixed point of stripping connections into sinks (non-output
/// nodes without outgoing links) and out of sources (non-input nodes without
/// incoming links), extended to dangling cycles: a connection survives iff its
/// source is reachable from an input and an output is reachable from its
/// destination.
pub fn working_connections<T: Scalar>(network: &Network<T>) -> Vec<usize> {
    let n = network.node_count();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for c in network.connections().iter().filter(|c| c.active) {
        fwd[c.src.index].push(c.dst.index);
        bwd[c.dst.index].push(c.src.index);
    }
    let from_inputs = reach(&fwd, network.input_range());
    let to_outputs = reach(&bwd, network.output_range());
    network
        .connections()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.active && from_inputs[c.src.index] && to_outputs[c.dst.index])
        .map(|(k, _)| k)
        .collect()
}

fn reach(adj: &[Vec<usize>], seeds: impl Iterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = seeds.collect();
    for &s in &queue {
        seen[s] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Shape of the working part of a pruned network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "depth")]
pub enum StructureClass {
    /// Only direct input-to-output links work.
    ZeroLayer,
    /// Working hidden nodes sit between inputs and outputs with no
    /// hidden-to-hidden links among them.
    SingleLayer,
    /// The longest working route crosses this many hidden nodes (at least 2).
    MultiLayer(usize),
    /// Working hidden nodes exist but only inside recurrent groups.
    Mixed,
}

impl std::fmt::Display for StructureClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructureClass::ZeroLayer => f.write_str("zero_layer"),
            StructureClass::SingleLayer => f.write_str("single_layer"),
            StructureClass::MultiLayer(d) => write!(f, "multi_layer({d})"),
            StructureClass::Mixed => f.write_str("mixed"),
        }
    }
}

/// Classifies the working connections of a network.
///
/// Depth is measured on the condensed working graph, where each recurrent
/// group counts as a single hidden node.
pub fn classify_structure<T: Scalar>(network: &Network<T>) -> StructureClass {
    let working = working_connections(network);
    let conns = network.connections();
    let hidden_involved = working
        .iter()
        .any(|&k| conns[k].src.kind == NodeKind::Hidden || conns[k].dst.kind == NodeKind::Hidden);
    if !hidden_involved {
        return StructureClass::ZeroLayer;
    }
    let hidden_links = working.iter().any(|&k| {
        let c = &conns[k];
        c.src.kind == NodeKind::Hidden && c.dst.kind == NodeKind::Hidden && c.src != c.dst
    });
    if !hidden_links {
        return StructureClass::SingleLayer;
    }

    let mut g = Digraph::new();
    for &k in &working {
        g.add_edge(conns[k].src, conns[k].dst);
    }
    let condensed = remove_cycles(&g, CycleGranularity::Component);
    let depth = longest_hidden_route(&condensed.graph);
    if depth >= 2 {
        StructureClass::MultiLayer(depth)
    } else {
        StructureClass::Mixed
    }
}

/// Maximum number of hidden or fake nodes on a path of an acyclic graph.
fn longest_hidden_route(g: &Digraph) -> usize {
    let mut indeg: BTreeMap<NodeId, usize> = g.nodes().map(|n| (n, 0)).collect();
    let mut succ: BTreeMap<NodeId, Vec<NodeId>> = g.nodes().map(|n| (n, Vec::new())).collect();
    for (a, b) in g.edges() {
        *indeg.get_mut(&b).unwrap() += 1;
        succ.get_mut(&a).unwrap().push(b);
    }
    let weight = |n: NodeId| usize::from(matches!(n.kind, NodeKind::Hidden | NodeKind::Fake));
    let mut best: BTreeMap<NodeId, usize> = g.nodes().map(|n| (n, weight(n))).collect();
    let mut queue: VecDeque<NodeId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
    let mut longest = 0;
    while let Some(v) = queue.pop_front() {
        let bv = best[&v];
        longest = longest.max(bv);
        for &w in &succ[&v] {
            let cand = bv + weight(w);
            let bw = best.get_mut(&w).unwrap();
            *bw = (*bw).max(cand);
            let d = indeg.get_mut(&w).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(w);
            }
        }
    }
    longest
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Network with only the listed connections active; weights all 1.
    fn wired(inputs: usize, hidden: usize, outputs: usize, links: &[(usize, usize)]) -> Network<f64> {
        let mut net = Network::<f64>::sbnn(inputs, hidden, outputs).unwrap();
        for c in net.connections_mut() {
            c.active = links.contains(&(c.src.index, c.dst.index));
            c.weight = 1.0;
        }
        net
    }

    fn set_weights(net: &mut Network<f64>, w: &[f64]) {
        for (c, &x) in net.connections_mut().iter_mut().zip(w) {
            c.weight = x;
        }
    }

    #[test]
    fn prunes_smallest_half() {
        // 2 inputs, 2 outputs, no hidden: four connections.
        let mut net = Network::<f64>::sbnn(2, 0, 2).unwrap();
        set_weights(&mut net, &[0.1, -0.5, 0.3, -0.05]);
        let ev = global_magnitude_prune(&mut net, 50.0, 3);
        let active: Vec<bool> = net.connections().iter().map(|c| c.active).collect();
        assert_eq!(active, vec![false, true, true, false]);
        assert_eq!(ev.removed, 2);
        assert_eq!(ev.episode, 3);
        assert!((ev.threshold - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_rate_is_a_no_op() {
        let mut net = Network::<f64>::sbnn(2, 1, 2).unwrap();
        let before = net.clone();
        let ev = global_magnitude_prune(&mut net, 0.0, 1);
        assert_eq!(ev.removed, 0);
        assert_eq!(ev.threshold, 0.0);
        assert_eq!(net, before);
    }

    #[test]
    fn ties_follow_canonical_order() {
        let mut net = Network::<f64>::sbnn(2, 3, 3).unwrap();
        assert_eq!(net.connections().len(), 30);
        let ev = global_magnitude_prune(&mut net, 60.0, 1);
        assert_eq!(ev.removed, 18);
        for (k, c) in net.connections().iter().enumerate() {
            assert_eq!(c.active, k >= 18, "connection {k}");
        }
    }

    #[test]
    fn repeat_prune_is_idempotent() {
        let mut net = Network::<f64>::sbnn(3, 3, 2).unwrap();
        let n = net.connections().len();
        set_weights(
            &mut net,
            &(0..n).map(|k| ((k * 7919) % 31) as f64 - 15.0).collect::<Vec<_>>(),
        );
        global_magnitude_prune(&mut net, 40.0, 1);
        let after_first = net.clone();
        let ev = global_magnitude_prune(&mut net, 40.0, 2);
        assert_eq!(ev.removed, 0);
        assert_eq!(net, after_first);
    }

    #[test]
    fn full_prune_empties_network() {
        let mut net = Network::<f64>::sbnn(2, 2, 2).unwrap();
        let ev = global_magnitude_prune(&mut net, 100.0, 1);
        assert_eq!(ev.removed, net.connections().len());
        assert_eq!(net.active_count(), 0);
    }

    #[test]
    fn working_set_examples() {
        // I=0, h=1, O=2 with h dangling.
        let net = wired(1, 1, 1, &[(0, 1)]);
        assert!(working_connections(&net).is_empty());

        // I=0, h=1..=3, O=4: I->h->O plus an isolated h2->h3.
        let net = wired(1, 3, 1, &[(0, 1), (1, 4), (2, 3)]);
        let w: Vec<_> = working_connections(&net)
            .into_iter()
            .map(|k| (net.connections()[k].src.index, net.connections()[k].dst.index))
            .collect();
        assert_eq!(w, vec![(0, 1), (1, 4)]);

        let net = wired(1, 0, 1, &[(0, 1)]);
        assert_eq!(working_connections(&net), vec![0]);
    }

    #[test]
    fn dangling_cycle_is_not_working() {
        // I -> h1 <-> h2, nothing reaches the output except I -> O.
        let net = wired(1, 2, 1, &[(0, 1), (1, 2), (2, 1), (0, 3)]);
        let w: Vec<_> = working_connections(&net)
            .into_iter()
            .map(|k| (net.connections()[k].src.index, net.connections()[k].dst.index))
            .collect();
        assert_eq!(w, vec![(0, 3)]);
    }

    #[test]
    fn structure_taxonomy() {
        // Nodes: I=0, A=1, B=2, C=3, O=4.
        let zero = wired(1, 3, 1, &[(0, 4), (1, 2)]);
        assert_eq!(classify_structure(&zero), StructureClass::ZeroLayer);

        let single = wired(1, 3, 1, &[(0, 1), (0, 2), (1, 4), (2, 4), (0, 4)]);
        assert_eq!(classify_structure(&single), StructureClass::SingleLayer);

        let two = wired(1, 3, 1, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]);
        assert_eq!(classify_structure(&two), StructureClass::MultiLayer(2));

        let recurrent = wired(1, 2, 1, &[(0, 1), (1, 2), (2, 1), (2, 3)]);
        assert_eq!(classify_structure(&recurrent), StructureClass::Mixed);

        let no_hidden = wired(2, 0, 1, &[(0, 2), (1, 2)]);
        assert_eq!(classify_structure(&no_hidden), StructureClass::ZeroLayer);
    }

    #[test]
    fn self_link_does_not_add_depth() {
        let net = wired(1, 1, 1, &[(0, 1), (1, 1), (1, 2)]);
        assert_eq!(classify_structure(&net), StructureClass::SingleLayer);
    }

    #[test]
    fn class_serialization() {
        let s = serde_json::to_string(&StructureClass::MultiLayer(3)).unwrap();
        assert_eq!(s, r#"{"class":"multi_layer","depth":3}"#);
        let z = serde_json::to_string(&StructureClass::ZeroLayer).unwrap();
        assert_eq!(z, r#"{"class":"zero_layer"}"#);
        assert_eq!(
            serde_json::from_str::<StructureClass>(&s).unwrap(),
            StructureClass::MultiLayer(3)
        );
    }
}
