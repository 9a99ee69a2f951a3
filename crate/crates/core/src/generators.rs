//! Small deterministic graph families used by tests, benchmarks and the guide.

use rand::Rng;

use crate::graph::{AttributedGraph, Label, NodeId, Strictness};

fn build(labels: Vec<Label>, edges: &[(NodeId, NodeId)]) -> AttributedGraph {
    AttributedGraph::from_edges(labels, edges, Strictness::Strict).expect("generator emits a simple graph")
}

/// Cycle `C_n` on nodes `0..n`, uniform label 0.
pub fn cycle(n: usize) -> AttributedGraph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n as NodeId).map(|i| (i, (i + 1) % n as NodeId)).collect();
    build(vec![0; n], &edges)
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> AttributedGraph {
    let edges: Vec<_> = (1..n as NodeId).map(|i| (i - 1, i)).collect();
    build(vec![0; n], &edges)
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> AttributedGraph {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            edges.push((u, v));
        }
    }
    build(vec![0; n], &edges)
}

/// Star `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> AttributedGraph {
    let edges: Vec<_> = (1..=leaves as NodeId).map(|v| (0, v)).collect();
    build(vec![0; leaves + 1], &edges)
}

/// Hub-and-rim graph: node 0 is adjacent to every rim node `1..=rim`, and
/// the rim nodes form a cycle. The hub induces `C(rim, 2)` three-node
/// subgraphs, which makes it a convenient source of one huge class.
pub fn wheel(rim: usize) -> AttributedGraph {
    assert!(rim >= 3);
    let mut edges: Vec<_> = (1..=rim as NodeId).map(|v| (0, v)).collect();
    for i in 0..rim as NodeId {
        edges.push((1 + i, 1 + (i + 1) % rim as NodeId));
    }
    build(vec![0; rim + 1], &edges)
}

/// Erdős–Rényi `G(n, p)` with labels drawn uniformly from `0..labels`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, labels: u32, rng: &mut R) -> AttributedGraph {
    let node_labels: Vec<Label> = (0..n).map(|_| rng.gen_range(0..labels.max(1))).collect();
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(node_labels, &edges)
}

/// A connected random graph: a random spanning tree plus `G(n, p)` extra edges.
pub fn connected_gnp<R: Rng + ?Sized>(n: usize, p: f64, labels: u32, rng: &mut R) -> AttributedGraph {
    let node_labels: Vec<Label> = (0..n).map(|_| rng.gen_range(0..labels.max(1))).collect();
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n as NodeId {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    build(node_labels, &edges)
}

/// Returns `g` with its labels replaced.
pub fn relabel(g: &AttributedGraph, labels: Vec<Label>) -> AttributedGraph {
    assert_eq!(labels.len(), g.node_count());
    let edges: Vec<_> = g.edges().collect();
    build(labels, &edges)
}
