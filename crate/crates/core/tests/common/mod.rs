//! Reference implementations written independently of the library, and the
//! checks that compare the two.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use sbnn::condensation::{remove_cycles, CycleGranularity, Digraph};
use sbnn::env::{CartPole, Environment, MountainCar};
use sbnn::network::{Network, NodeId, NodeKind};

/// Outcome of one acceptance criterion.
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Check {
            passed,
            detail: detail.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Environment dynamics, transcribed from the classic-control equations.

pub fn cartpole_oracle(s: [f64; 4], action: usize) -> ([f64; 4], bool) {
    let (g, mc, mp, l, f, dt) = (9.8, 1.0, 0.1, 0.5, 10.0, 0.02);
    let m = mc + mp;
    let force = if action == 1 { f } else { -f };
    let (x, v, th, w) = (s[0], s[1], s[2], s[3]);
    let (sin, cos) = th.sin_cos();
    let temp = (force + mp * l * w * w * sin) / m;
    let alpha = (g * sin - cos * temp) / (l * (4.0 / 3.0 - mp * cos * cos / m));
    let acc = temp - mp * l * alpha * cos / m;
    let next = [x + dt * v, v + dt * acc, th + dt * w, w + dt * alpha];
    let limit = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
    let done = next[0].abs() > 2.4 || next[2].abs() > limit;
    (next, done)
}

pub fn mountaincar_oracle(s: [f64; 2], action: usize) -> ([f64; 2], bool) {
    let mut v = s[1] + (action as f64 - 1.0) * 0.001 - 0.0025 * (3.0 * s[0]).cos();
    v = v.clamp(-0.07, 0.07);
    let mut p = (s[0] + v).clamp(-1.2, 0.6);
    if p == -1.2 && v < 0.0 {
        v = 0.0;
    }
    p = p.clamp(-1.2, 0.6);
    let done = p >= 0.5 && v >= 0.0;
    ([p, v], done)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Plays `pairs` random (reset seed, action sequence) pairs through the
/// library and the oracle. Returns the number of mismatching pairs and the
/// largest state deviation seen.
pub fn transcript_check(task: sbnn::Task, pairs: usize, master: u64) -> (usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let seed: u64 = rng.random();
        let bias: f64 = rng.random();
        let mut ok = true;
        match task {
            sbnn::Task::CartPole => {
                let mut env = CartPole::new();
                let obs = env.reset(seed);
                let mut s = env.state();
                ok &= obs == s.to_vec() && s.iter().all(|x| x.abs() <= 0.05);
                for t in 0..CartPole::SPEC.max_steps {
                    let a = usize::from(rng.random::<f64>() < bias);
                    let tr = env.step(a).unwrap();
                    let (next, failed) = cartpole_oracle(s, a);
                    worst = worst.max(max_abs_diff(&tr.observation, &next));
                    let done = failed || t + 1 == CartPole::SPEC.max_steps;
                    ok &= max_abs_diff(&tr.observation, &next) <= 1e-9 && tr.reward == 1.0 && tr.terminated == done;
                    s = next;
                    if done {
                        break;
                    }
                }
            }
            sbnn::Task::MountainCar => {
                let mut env = MountainCar::new();
                let obs = env.reset(seed);
                let mut s = env.state();
                ok &= obs == s.to_vec() && (-0.6..-0.4).contains(&s[0]) && s[1] == 0.0;
                for t in 0..MountainCar::SPEC.max_steps {
                    let a = if rng.random::<f64>() < bias {
                        2
                    } else {
                        rng.random_range(0..3)
                    };
                    let tr = env.step(a).unwrap();
                    let (next, reached) = mountaincar_oracle(s, a);
                    worst = worst.max(max_abs_diff(&tr.observation, &next));
                    let done = reached || t + 1 == MountainCar::SPEC.max_steps;
                    ok &= max_abs_diff(&tr.observation, &next) <= 1e-9 && tr.reward == -1.0 && tr.terminated == done;
                    s = next;
                    if done {
                        break;
                    }
                }
            }
        }
        bad += usize::from(!ok);
    }
    (bad, worst)
}

// ---------------------------------------------------------------------------
// Graph oracles on plain index graphs.

/// Three-colour depth-first search.
pub fn has_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    fn visit(v: usize, adj: &[Vec<usize>], colour: &mut [u8]) -> bool {
        colour[v] = 1;
        for &w in &adj[v] {
            if colour[w] == 1 || (colour[w] == 0 && visit(w, adj, colour)) {
                return true;
            }
        }
        colour[v] = 2;
        false
    }
    let mut colour = vec![0u8; n];
    (0..n).any(|v| colour[v] == 0 && visit(v, &adj, &mut colour))
}

/// `r[a][b]`: a path of length at least one leads from `a` to `b`.
pub fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                let via = r[k].clone();
                for (dst, &hop) in r[i].iter_mut().zip(&via) {
                    *dst |= hop;
                }
            }
        }
    }
    r
}

/// Enumerates simple paths from `from` by backtracking until one reaches a
/// node of `targets`. `from` itself counts when it is a target.
pub fn simple_path_exists(adj: &[Vec<usize>], from: usize, targets: &BTreeSet<usize>) -> bool {
    fn walk(v: usize, adj: &[Vec<usize>], targets: &BTreeSet<usize>, on_path: &mut Vec<bool>) -> bool {
        if targets.contains(&v) {
            return true;
        }
        on_path[v] = true;
        for &w in &adj[v] {
            if !on_path[w] && walk(w, adj, targets, on_path) {
                on_path[v] = false;
                return true;
            }
        }
        on_path[v] = false;
        false
    }
    walk(from, adj, targets, &mut vec![false; adj.len()])
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random::<f64>() < density {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn hidden(k: usize) -> NodeId {
    NodeId::new(k, NodeKind::Hidden)
}

/// Cycle removal against the oracles for one graph: acyclic output, every
/// original node represented exactly once, reachability preserved (checked
/// when `n <= 12`). Returns a failure description.
pub fn condensation_failure(n: usize, edges: &[(usize, usize)], granularity: CycleGranularity) -> Option<String> {
    let mut g = Digraph::new();
    for k in 0..n {
        g.add_node(hidden(k));
    }
    for &(a, b) in edges {
        g.add_edge(hidden(a), hidden(b));
    }
    let condensed = remove_cycles(&g, granularity);

    let nodes: Vec<NodeId> = condensed.graph.nodes().collect();
    let pos = |id: NodeId| nodes.iter().position(|&m| m == id).unwrap();
    let cedges: Vec<(usize, usize)> = condensed.graph.edges().map(|(a, b)| (pos(a), pos(b))).collect();
    if has_cycle(nodes.len(), &cedges) {
        return Some("condensed graph has a cycle".into());
    }

    let mut seen: Vec<NodeId> = nodes.iter().flat_map(|&m| condensed.flatten(m)).collect();
    seen.sort();
    let expected: Vec<NodeId> = (0..n).map(hidden).collect();
    if seen != expected {
        return Some(format!("node multiset changed: {seen:?}"));
    }
    if condensed.history.keys().any(|f| f.kind != NodeKind::Fake) {
        return Some("history keyed by a concrete node".into());
    }

    if n <= 12 {
        let orig = transitive_closure(n, edges);
        let cond = transitive_closure(nodes.len(), &cedges);
        let image: Vec<usize> = (0..n).map(|k| pos(condensed.image_of(hidden(k)).unwrap())).collect();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let (ia, ib) = (image[a], image[b]);
                let via_condensed = ia == ib || cond[ia][ib];
                if orig[a][b] != via_condensed {
                    return Some(format!("reachability {a}->{b} changed"));
                }
                if ia == ib && !(orig[a][b] && orig[b][a]) {
                    return Some(format!("{a} and {b} merged without a cycle"));
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Networks.

/// Dense network with `n` nodes or fewer, random weights and a random active
/// subset.
pub fn random_network(rng: &mut ChaCha8Rng, max_nodes: usize) -> Network<f64> {
    let inputs = rng.random_range(1..=3);
    let outputs = rng.random_range(1..=3);
    let hidden = rng.random_range(0..=max_nodes - inputs - outputs);
    let mut net = Network::<f64>::sbnn(inputs, hidden, outputs).unwrap();
    let keep: f64 = rng.random_range(0.1..0.9);
    let normal = Normal::new(0.0, 1.0).unwrap();
    for c in net.connections_mut() {
        c.weight = normal.sample(rng);
        c.active = rng.random::<f64>() < keep;
    }
    net
}

/// Active connections whose source can be reached from an input and whose
/// destination can reach an output, by exhaustive simple-path search.
pub fn working_oracle(net: &Network<f64>) -> Vec<usize> {
    let n = net.node_count();
    let mut adj = vec![Vec::new(); n];
    let mut radj = vec![Vec::new(); n];
    for c in net.connections().iter().filter(|c| c.active) {
        adj[c.src.index].push(c.dst.index);
        radj[c.dst.index].push(c.src.index);
    }
    let inputs: BTreeSet<usize> = net.input_range().collect();
    let outputs: BTreeSet<usize> = net.output_range().collect();
    net.connections()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.active
                && simple_path_exists(&radj, c.src.index, &inputs)
                && simple_path_exists(&adj, c.dst.index, &outputs)
        })
        .map(|(k, _)| k)
        .collect()
}
