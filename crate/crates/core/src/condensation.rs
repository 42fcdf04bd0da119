//! Cycle removal with fake nodes and the activation schedule derived from it.
//!
//! Cycles are repeatedly replaced by a fake node that inherits the external
//! incoming and outgoing edges of the nodes it hides. The replaced sets are
//! kept in a history, and a replaced set may itself contain an earlier fake
//! node. Once the graph is acyclic its topological order drives activation,
//! and every fake node expands back into a group of its members that is
//! visited in a random order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, NodeId, NodeKind};
use crate::scalar::Scalar;

/// How much of a cyclic region is hidden behind one fake node per iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleGranularity {
    /// A whole strongly connected component at a time.
    #[default]
    Component,
    /// One shortest simple cycle at a time. Overlapping cycles then nest,
    /// e.g. `{B, C}` first and then `{A, F0}`.
    SimpleCycle,
}

/// Tie-break order: concrete nodes by index, then fake nodes by index.
#[inline]
fn key(n: NodeId) -> (bool, usize) {
    (n.kind == NodeKind::Fake, n.index)
}

/// Simple directed graph over [`NodeId`]s. Self-loops are dropped on insertion
/// since they never constrain an activation order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl Digraph {
    pub fn new() -> Self {
        Digraph::default()
    }

    /// Every node of the network plus its active connections.
    pub fn from_network<T: Scalar>(network: &Network<T>) -> Self {
        let mut g = Digraph::new();
        for k in 0..network.node_count() {
            g.add_node(network.node(k));
        }
        for c in network.connections().iter().filter(|c| c.active) {
            g.add_edge(c.src, c.dst);
        }
        g
    }

    pub fn add_node(&mut self, n: NodeId) {
        self.nodes.insert(n);
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId) {
        self.nodes.insert(from);
        self.nodes.insert(to);
        if from != to {
            self.edges.insert((from, to));
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Successor lists, each sorted by tie-break order.
    fn successors(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut succ: BTreeMap<NodeId, Vec<NodeId>> = self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        for &(a, b) in &self.edges {
            succ.get_mut(&a).expect("edge endpoint is a node").push(b);
        }
        for list in succ.values_mut() {
            list.sort_by_key(|&n| key(n));
        }
        succ
    }

    /// Strongly connected components (Tarjan, iterative).
    pub fn strongly_connected_components(&self) -> Vec<Vec<NodeId>> {
        let order: Vec<NodeId> = {
            let mut v: Vec<NodeId> = self.nodes.iter().copied().collect();
            v.sort_by_key(|&n| key(n));
            v
        };
        let pos: BTreeMap<NodeId, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let succ = self.successors();
        let adj: Vec<Vec<usize>> = order.iter().map(|n| succ[n].iter().map(|m| pos[m]).collect()).collect();

        let n = order.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next = 0;
        let mut comps = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut child)) = call.last_mut() {
                if let Some(&w) = adj[v].get(*child) {
                    *child += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(order[w]);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_by_key(|&n| key(n));
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }
}

/// Returns the nodes of some cycle, or an empty vector if the graph is acyclic.
///
/// The cycle is taken from the strongly connected component holding the
/// smallest node (concrete before fake, then by index) that lies on any cycle.
/// With [`CycleGranularity::Component`] the whole component is returned; with
/// [`CycleGranularity::SimpleCycle`] a shortest cycle through that node,
/// exploring successors in ascending order.
pub fn find_cycle(graph: &Digraph, granularity: CycleGranularity) -> Vec<NodeId> {
    let Some(comp) = graph
        .strongly_connected_components()
        .into_iter()
        .filter(|c| c.len() >= 2)
        .min_by_key(|c| key(c[0]))
    else {
        return Vec::new();
    };
    match granularity {
        CycleGranularity::Component => comp,
        CycleGranularity::SimpleCycle => shortest_cycle_through(graph, &comp),
    }
}

fn shortest_cycle_through(graph: &Digraph, comp: &[NodeId]) -> Vec<NodeId> {
    let start = comp[0];
    let inside: BTreeSet<NodeId> = comp.iter().copied().collect();
    let succ = graph.successors();
    let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &succ[&v] {
            if !inside.contains(&w) {
                continue;
            }
            if w == start {
                let mut cycle = vec![v];
                let mut cur = v;
                while cur != start {
                    cur = parent[&cur];
                    cycle.push(cur);
                }
                cycle.sort_by_key(|&n| key(n));
                cycle.dedup();
                return cycle;
            }
            if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(w) {
                slot.insert(v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("a strongly connected component with two or more nodes has a cycle through each node")
}

/// The acyclic graph left after cycle removal plus the record of which nodes
/// each fake node replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondensedGraph {
    pub graph: Digraph,
    pub history: BTreeMap<NodeId, Vec<NodeId>>,
}

impl CondensedGraph {
    /// Concrete nodes hidden behind `node`, recursively. A concrete node
    /// flattens to itself.
    pub fn flatten(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.flatten_into(node, &mut out);
        out
    }

    fn flatten_into(&self, node: NodeId, out: &mut Vec<NodeId>) {
        match self.history.get(&node) {
            Some(members) => members.iter().for_each(|&m| self.flatten_into(m, out)),
            None => out.push(node),
        }
    }

    /// The top-level node of the condensed graph that stands for `original`.
    pub fn image_of(&self, original: NodeId) -> Option<NodeId> {
        self.graph
            .nodes()
            .find(|&n| n == original || (self.history.contains_key(&n) && self.flatten(n).contains(&original)))
    }
}

/// Replaces cycles with fake nodes until the graph is acyclic.
///
/// Each iteration takes the edges entering and leaving the cycle from outside,
/// removes the cycle's nodes, inserts fake node `F_i` and re-attaches those
/// edges to it. Parallel edges produced by re-attachment collapse into one.
/// Fake indices count up from zero.
pub fn remove_cycles(graph: &Digraph, granularity: CycleGranularity) -> CondensedGraph {
    let mut g = graph.clone();
    let mut history = BTreeMap::new();
    let mut next_fake = 0;
    loop {
        let cycle = find_cycle(&g, granularity);
        if cycle.is_empty() {
            break;
        }
        let members: BTreeSet<NodeId> = cycle.iter().copied().collect();
        let fake = NodeId::new(next_fake, NodeKind::Fake);
        next_fake += 1;

        let mut kept = BTreeSet::new();
        let mut reattached = Vec::new();
        for &(a, b) in &g.edges {
            match (members.contains(&a), members.contains(&b)) {
                (false, false) => {
                    kept.insert((a, b));
                }
                (false, true) => reattached.push((a, fake)),
                (true, false) => reattached.push((fake, b)),
                (true, true) => {}
            }
        }
        g.edges = kept;
        g.nodes.retain(|n| !members.contains(n));
        g.add_node(fake);
        for (a, b) in reattached {
            g.add_edge(a, b);
        }
        history.insert(fake, cycle);
    }
    CondensedGraph { graph: g, history }
}

/// One step of an activation schedule: a concrete node, or a group of nodes
/// (possibly nested groups) to be visited in a random order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleEntry {
    Node(usize),
    Group(Vec<ScheduleEntry>),
}

impl ScheduleEntry {
    fn flatten_into(&self, out: &mut Vec<usize>) {
        match self {
            ScheduleEntry::Node(n) => out.push(*n),
            ScheduleEntry::Group(g) => g.iter().for_each(|e| e.flatten_into(out)),
        }
    }

    fn visit<R: Rng + ?Sized>(&self, rng: &mut R, f: &mut impl FnMut(usize)) {
        match self {
            ScheduleEntry::Node(n) => f(*n),
            ScheduleEntry::Group(members) => {
                let mut order: Vec<usize> = (0..members.len()).collect();
                order.shuffle(rng);
                for k in order {
                    members[k].visit(rng, f);
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivationSchedule {
    pub entries: Vec<ScheduleEntry>,
}

impl ActivationSchedule {
    /// Node indices in schedule order with groups left in member order.
    pub fn flatten(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.entries.iter().for_each(|e| e.flatten_into(&mut out));
        out
    }

    /// Calls `f` on every scheduled node. Groups are visited in a fresh random
    /// order each call, and a nested group is finished before its parent
    /// moves on to the next member.
    pub fn visit<R: Rng + ?Sized>(&self, rng: &mut R, mut f: impl FnMut(usize)) {
        for e in &self.entries {
            e.visit(rng, &mut f);
        }
    }

    pub fn has_groups(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, ScheduleEntry::Group(_)))
    }

    /// Condenses the network's active graph and schedules its hidden nodes.
    pub fn for_network<T: Scalar>(network: &Network<T>, granularity: CycleGranularity) -> Self {
        let condensed = remove_cycles(&Digraph::from_network(network), granularity);
        topological_schedule(&condensed).expect("condensed graph is acyclic")
    }
}

/// Topological order of the hidden and fake nodes of a condensed graph, with
/// ties resolved by ascending node order. Inputs and outputs are left out:
/// they always come first and last.
pub fn topological_schedule(condensed: &CondensedGraph) -> Result<ActivationSchedule> {
    let g = &condensed.graph;
    let succ = g.successors();
    let mut indegree: BTreeMap<NodeId, usize> = g.nodes().map(|n| (n, 0)).collect();
    for (_, b) in g.edges() {
        *indegree.get_mut(&b).expect("edge endpoint is a node") += 1;
    }
    let mut ready: BinaryHeap<Reverse<((bool, usize), NodeId)>> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| Reverse((key(n), n)))
        .collect();

    let mut entries = Vec::new();
    let mut seen = 0;
    while let Some(Reverse((_, n))) = ready.pop() {
        seen += 1;
        if matches!(n.kind, NodeKind::Hidden | NodeKind::Fake) {
            entries.push(expand(condensed, n));
        }
        for &m in &succ[&n] {
            let d = indegree.get_mut(&m).expect("successor is a node");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse((key(m), m)));
            }
        }
    }
    if seen != g.node_count() {
        return Err(Error::CycleDetected);
    }
    Ok(ActivationSchedule { entries })
}

fn expand(condensed: &CondensedGraph, n: NodeId) -> ScheduleEntry {
    match condensed.history.get(&n) {
        Some(members) => ScheduleEntry::Group(members.iter().map(|&m| expand(condensed, m)).collect()),
        None => ScheduleEntry::Node(n.index),
    }
}
