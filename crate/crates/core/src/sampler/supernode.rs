use std::collections::HashSet;

use crate::exact::BoundedClassResult;
use crate::graph::AttributedGraph;
use crate::hon::hon_neighborhood;
use crate::relation::FilterFn;
use crate::subgraph::Subgraph;

/// Known class members collapsed into a single walk state.
#[derive(Debug, Clone)]
pub struct SupernodeState {
    pub anchor: Subgraph,
    /// Members in discovery order; the anchor comes first.
    pub members: Vec<Subgraph>,
    member_set: HashSet<Subgraph>,
    /// `(member index, outside neighbor)` for every HON edge leaving the
    /// supernode.
    pub boundary_edges: Vec<(u32, Subgraph)>,
    /// `Σ g` over the members.
    pub alpha_inside: f64,
    /// `Σ |N(m)|` over the members.
    pub degree_inside: f64,
}

impl SupernodeState {
    /// Number of boundary edges `D`.
    pub fn boundary_degree(&self) -> usize {
        self.boundary_edges.len()
    }

    pub fn contains(&self, s: &Subgraph) -> bool {
        self.member_set.contains(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Collapses the members found by a class BFS.
pub fn build_supernode(g: &AttributedGraph, anchor: &Subgraph, bfs: &BoundedClassResult, h: &FilterFn) -> SupernodeState {
    let member_set: HashSet<Subgraph> = bfs.members.iter().cloned().collect();
    let mut boundary_edges = Vec::new();
    let mut degree_inside = 0.0;
    for (i, m) in bfs.members.iter().enumerate() {
        let neighbors = hon_neighborhood(g, m, h);
        degree_inside += neighbors.len() as f64;
        for n in neighbors {
            if !member_set.contains(&n) {
                boundary_edges.push((i as u32, n));
            }
        }
    }
    SupernodeState {
        anchor: anchor.clone(),
        members: bfs.members.clone(),
        member_set,
        boundary_edges,
        alpha_inside: bfs.alpha_partial,
        degree_inside,
    }
}
