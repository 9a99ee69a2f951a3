//! Connected induced subgraphs (CIS) identified by their sorted node set.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AttributedGraph, NodeId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SubgraphError {
    #[error("node {node} is outside the graph (node count {node_count})")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("node set {0:?} does not induce a connected subgraph")]
    DisconnectedNodeSet(Vec<NodeId>),
    #[error("node set is empty")]
    Empty,
    #[error("node {0} appears more than once")]
    RepeatedNode(NodeId),
}

/// A connected induced subgraph of a host graph.
///
/// Equality, hashing and ordering are those of the sorted node set, so two
/// values compare equal iff they denote the same CIS. Edges are not stored:
/// they are always read back from the host graph.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subgraph(Box<[NodeId]>);

impl Subgraph {
    /// Wraps an already sorted, connected node set. Callers inside the crate
    /// guarantee both properties.
    pub(crate) fn from_sorted_unchecked(nodes: Vec<NodeId>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Self(nodes.into_boxed_slice())
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    /// Number of nodes `k`.
    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Number of shared nodes with `other`.
    pub fn overlap(&self, other: &Subgraph) -> usize {
        let (mut i, mut j, mut shared) = (0, 0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        shared
    }

    /// Number of edges of the induced subgraph.
    pub fn edge_count(&self, g: &AttributedGraph) -> usize {
        let n = self.0.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if g.has_edge(self.0[i], self.0[j]) {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Debug for Subgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{:?}", &self.0)
    }
}

impl fmt::Display for Subgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Builds the CIS on `nodes`, failing if the induced graph is disconnected.
pub fn induced_subgraph(g: &AttributedGraph, nodes: &[NodeId]) -> Result<Subgraph, SubgraphError> {
    if nodes.is_empty() {
        return Err(SubgraphError::Empty);
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(SubgraphError::RepeatedNode(w[0]));
        }
    }
    for &v in &sorted {
        if v as usize >= g.node_count() {
            return Err(SubgraphError::NodeOutOfRange { node: v, node_count: g.node_count() });
        }
    }
    if !is_connected_set(g, &sorted) {
        return Err(SubgraphError::DisconnectedNodeSet(sorted));
    }
    Ok(Subgraph::from_sorted_unchecked(sorted))
}

/// Connectivity of the subgraph induced by `nodes` (any order, `len <= 64`).
pub fn is_connected_set(g: &AttributedGraph, nodes: &[NodeId]) -> bool {
    let n = nodes.len();
    if n <= 1 {
        return true;
    }
    assert!(n <= 64, "connectivity check supports at most 64 nodes");
    let mut adj = [0u64; 64];
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(nodes[i], nodes[j]) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    mask_connected(&adj[..n])
}

/// Connectivity of a small graph given as neighbor bitmasks.
pub(crate) fn mask_connected(adj: &[u64]) -> bool {
    let n = adj.len();
    if n <= 1 {
        return true;
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let i = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[i];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen & full == full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn arc_of_cycle_is_connected() {
        let c5 = generators::cycle(5);
        let s = induced_subgraph(&c5, &[2, 0, 1]).unwrap();
        assert_eq!(s.nodes(), &[0, 1, 2]);
    }

    #[test]
    fn non_adjacent_pair_is_disconnected() {
        let c5 = generators::cycle(5);
        assert_eq!(
            induced_subgraph(&c5, &[0, 2]),
            Err(SubgraphError::DisconnectedNodeSet(vec![0, 2]))
        );
    }

    #[test]
    fn every_triple_of_k4_is_connected() {
        let k4 = generators::complete(4);
        let mut ok = 0;
        for a in 0..4u32 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    induced_subgraph(&k4, &[a, b, c]).unwrap();
                    ok += 1;
                }
            }
        }
        assert_eq!(ok, 4);
    }

    #[test]
    fn out_of_range_and_repeats() {
        let c5 = generators::cycle(5);
        assert_eq!(
            induced_subgraph(&c5, &[4, 5]),
            Err(SubgraphError::NodeOutOfRange { node: 5, node_count: 5 })
        );
        assert_eq!(induced_subgraph(&c5, &[1, 1]), Err(SubgraphError::RepeatedNode(1)));
        assert_eq!(induced_subgraph(&c5, &[]), Err(SubgraphError::Empty));
    }

    #[test]
    fn overlap_counts_shared_nodes() {
        let k4 = generators::complete(4);
        let a = induced_subgraph(&k4, &[0, 1, 2]).unwrap();
        let b = induced_subgraph(&k4, &[1, 2, 3]).unwrap();
        assert_eq!(a.overlap(&b), 2);
        assert_eq!(a.overlap(&a), 3);
    }
}
