//! Neighborhoods in the k-node high-order network (HON).
//!
//! The HON has one node per k-node CIS; two CISes are adjacent when they
//! share exactly `k-1` nodes. It is never materialized: neighborhoods are
//! generated on demand from the host graph.

use crate::graph::{AttributedGraph, NodeId};
use crate::relation::FilterFn;
use crate::subgraph::{mask_connected, Subgraph};

/// Calls `visit` with the sorted node set of every HON neighbor of `s` that
/// passes `h`. Order is unspecified.
pub(crate) fn for_each_neighbor_nodes<F>(g: &AttributedGraph, s: &Subgraph, h: &FilterFn, mut visit: F)
where
    F: FnMut(&[NodeId]),
{
    let nodes = s.nodes();
    let k = nodes.len();
    if k == 1 {
        let v = nodes[0];
        for u in 0..g.node_count() as NodeId {
            if u != v && h.accepts_nodes(g, &[u]) {
                visit(&[u]);
            }
        }
        return;
    }
    assert!(k <= 64, "subgraphs are limited to 64 nodes");

    // Adjacency among the nodes of s as bitmasks over positions.
    let mut inner = [0u64; 64];
    for i in 0..k {
        for j in i + 1..k {
            if g.has_edge(nodes[i], nodes[j]) {
                inner[i] |= 1 << j;
                inner[j] |= 1 << i;
            }
        }
    }

    let mut candidates: Vec<NodeId> = Vec::new();
    let mut local = [0u64; 64];
    let mut buf: Vec<NodeId> = Vec::with_capacity(k);
    for drop in 0..k {
        candidates.clear();
        for (i, &w) in nodes.iter().enumerate() {
            if i != drop {
                candidates.extend(g.neighbors(w).iter().copied().filter(|u| !s.contains(*u)));
            }
        }
        candidates.sort_unstable();
        candidates.dedup();

        // Positions 0..k-1 hold the retained nodes, position k-1 holds u.
        let kept: Vec<usize> = (0..k).filter(|&i| i != drop).collect();
        for (a, &i) in kept.iter().enumerate() {
            let mut m = 0u64;
            for (b, &j) in kept.iter().enumerate() {
                if inner[i] >> j & 1 == 1 {
                    m |= 1 << b;
                }
            }
            local[a] = m;
        }
        for &u in &candidates {
            let mut um = 0u64;
            for (a, &i) in kept.iter().enumerate() {
                let base = local[a] & ((1u64 << (k - 1)) - 1);
                if g.has_edge(nodes[i], u) {
                    um |= 1 << a;
                    local[a] = base | 1 << (k - 1);
                } else {
                    local[a] = base;
                }
            }
            local[k - 1] = um;
            if !mask_connected(&local[..k]) {
                continue;
            }
            buf.clear();
            buf.extend(kept.iter().map(|&i| nodes[i]));
            let pos = buf.partition_point(|&x| x < u);
            buf.insert(pos, u);
            if h.accepts_nodes(g, &buf) {
                visit(&buf);
            }
        }
    }
}

/// All HON neighbors of `s` passing `h`, sorted by node set.
pub fn hon_neighborhood(g: &AttributedGraph, s: &Subgraph, h: &FilterFn) -> Vec<Subgraph> {
    let mut out = Vec::new();
    for_each_neighbor_nodes(g, s, h, |nodes| out.push(Subgraph::from_sorted_unchecked(nodes.to_vec())));
    out.sort_unstable();
    out
}

/// `hon_neighborhood(g, s, h).len()` without building the list.
pub fn hon_degree(g: &AttributedGraph, s: &Subgraph, h: &FilterFn) -> usize {
    let mut count = 0;
    for_each_neighbor_nodes(g, s, h, |_| count += 1);
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_cis;
    use crate::generators;
    use crate::subgraph::induced_subgraph;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sg(g: &AttributedGraph, nodes: &[NodeId]) -> Subgraph {
        induced_subgraph(g, nodes).unwrap()
    }

    /// Brute force: every CIS of the same size sharing `k-1` nodes.
    fn naive_neighborhood(g: &AttributedGraph, s: &Subgraph, h: &FilterFn) -> Vec<Subgraph> {
        let mut out: Vec<Subgraph> = enumerate_cis(g, s.size(), h)
            .into_iter()
            .filter(|t| t != s && t.overlap(s) + 1 == s.size())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn c5_arc() {
        let g = generators::cycle(5);
        let n = hon_neighborhood(&g, &sg(&g, &[0, 1, 2]), &FilterFn::None);
        assert_eq!(n, vec![sg(&g, &[0, 1, 4]), sg(&g, &[1, 2, 3])]);
        assert_eq!(hon_degree(&g, &sg(&g, &[0, 1, 2]), &FilterFn::None), 2);
    }

    #[test]
    fn single_edge_has_no_neighbors() {
        let g = generators::path(2);
        assert!(hon_neighborhood(&g, &sg(&g, &[0, 1]), &FilterFn::None).is_empty());
        assert_eq!(hon_degree(&g, &sg(&g, &[0, 1]), &FilterFn::None), 0);
    }

    #[test]
    fn star_edge() {
        let g = generators::star(3);
        let n = hon_neighborhood(&g, &sg(&g, &[0, 1]), &FilterFn::None);
        assert_eq!(n, vec![sg(&g, &[0, 2]), sg(&g, &[0, 3])]);
    }

    #[test]
    fn complete_graph_edges() {
        for m in 3..7 {
            let g = generators::complete(m);
            let s = sg(&g, &[0, 1]);
            assert_eq!(hon_degree(&g, &s, &FilterFn::None), naive_neighborhood(&g, &s, &FilterFn::None).len());
            assert_eq!(hon_degree(&g, &s, &FilterFn::None), 2 * (m - 2));
        }
    }

    #[test]
    fn retained_set_need_not_be_connected() {
        // Dropping the middle of a path leaves two isolated ends that a
        // common neighbor reconnects.
        let g = generators::cycle(4);
        let n = hon_neighborhood(&g, &sg(&g, &[0, 1, 2]), &FilterFn::None);
        assert!(n.contains(&sg(&g, &[0, 2, 3])));
    }

    #[test]
    fn filter_restricts_neighbors() {
        let g = generators::wheel(5);
        let s = sg(&g, &[0, 1, 2]);
        let h = FilterFn::MinInternalDegree(2);
        for n in hon_neighborhood(&g, &s, &h) {
            assert_eq!(n.edge_count(&g), 3);
        }
        assert_eq!(hon_degree(&g, &s, &h), hon_neighborhood(&g, &s, &h).len());
    }

    #[test]
    fn k1_neighbors_are_all_other_nodes() {
        let g = generators::path(4);
        assert_eq!(hon_degree(&g, &sg(&g, &[2]), &FilterFn::None), 3);
    }

    fn check_against_naive(g: &AttributedGraph, k: usize) {
        let all = enumerate_cis(g, k, &FilterFn::None);
        for s in &all {
            let fast = hon_neighborhood(g, s, &FilterFn::None);
            assert_eq!(fast, naive_neighborhood(g, s, &FilterFn::None), "s = {s:?}");
            for t in &fast {
                assert!(hon_neighborhood(g, t, &FilterFn::None).contains(s), "asymmetric {s:?} {t:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn symmetric_and_matches_brute_force(seed in any::<u64>(), n in 4usize..14, k in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = generators::gnp(n, 0.35, 2, &mut rng);
            check_against_naive(&g, k);
        }
    }

    #[test]
    fn symmetric_on_twenty_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let g = generators::connected_gnp(20, 0.08, 3, &mut rng);
        check_against_naive(&g, 3);
    }
}
