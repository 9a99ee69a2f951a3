//! Exhaustive CIS enumeration (ESU) and random seed subgraphs.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{AttributedGraph, NodeId};
use crate::relation::FilterFn;
use crate::subgraph::Subgraph;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("no valid {k}-node subgraph found after {attempts} attempts")]
pub struct SeedNotFound {
    pub k: usize,
    pub attempts: usize,
}

/// Default number of expansion attempts in [`random_seed_subgraph`].
pub const DEFAULT_SEED_ATTEMPTS: usize = 1000;

/// Visits every k-node CIS accepted by `h` exactly once.
///
/// Each CIS is generated from its smallest node `v`; extension candidates
/// must exceed `v` and be exclusive neighbors of the node just added.
/// Returns the number of subgraphs visited, or stops early when `visit`
/// breaks.
pub fn for_each_cis<F>(g: &AttributedGraph, k: usize, h: &FilterFn, mut visit: F) -> usize
where
    F: FnMut(&Subgraph) -> ControlFlow<()>,
{
    assert!(k >= 1);
    let mut count = 0;
    let mut sub = Vec::with_capacity(k);
    for v in 0..g.node_count() as NodeId {
        sub.clear();
        sub.push(v);
        let ext: Vec<NodeId> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        if extend(g, k, h, v, &mut sub, ext, &mut count, &mut visit).is_break() {
            break;
        }
    }
    count
}

#[allow(clippy::too_many_arguments)]
fn extend<F>(
    g: &AttributedGraph,
    k: usize,
    h: &FilterFn,
    root: NodeId,
    sub: &mut Vec<NodeId>,
    mut ext: Vec<NodeId>,
    count: &mut usize,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Subgraph) -> ControlFlow<()>,
{
    if sub.len() == k {
        let mut nodes = sub.clone();
        nodes.sort_unstable();
        if h.accepts_nodes(g, &nodes) {
            *count += 1;
            return visit(&Subgraph::from_sorted_unchecked(nodes));
        }
        return ControlFlow::Continue(());
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in g.neighbors(w) {
            if u > root
                && !sub.contains(&u)
                && !next.contains(&u)
                && !sub.iter().any(|&x| g.has_edge(x, u))
            {
                next.push(u);
            }
        }
        sub.push(w);
        let flow = extend(g, k, h, root, sub, next, count, visit);
        sub.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// All k-node CISes accepted by `h`, sorted.
pub fn enumerate_cis(g: &AttributedGraph, k: usize, h: &FilterFn) -> Vec<Subgraph> {
    let mut out = Vec::new();
    for_each_cis(g, k, h, |s| {
        out.push(s.clone());
        ControlFlow::Continue(())
    });
    out.sort_unstable();
    out
}

/// Draws a start node uniformly and grows it by uniformly chosen frontier
/// nodes until it has `k` nodes, retrying until `h` accepts the result.
///
/// The result is not uniform over CISes.
pub fn random_seed_subgraph<R: Rng + ?Sized>(
    g: &AttributedGraph,
    k: usize,
    h: &FilterFn,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Subgraph, SeedNotFound> {
    let n = g.node_count();
    if n == 0 || k == 0 {
        return Err(SeedNotFound { k, attempts: 0 });
    }
    let mut frontier: Vec<NodeId> = Vec::new();
    for _ in 0..max_attempts {
        let mut nodes = vec![rng.gen_range(0..n as NodeId)];
        while nodes.len() < k {
            frontier.clear();
            for &v in &nodes {
                frontier.extend(g.neighbors(v).iter().copied().filter(|u| !nodes.contains(u)));
            }
            frontier.sort_unstable();
            frontier.dedup();
            match frontier.choose(rng) {
                Some(&u) => nodes.push(u),
                None => break,
            }
        }
        if nodes.len() < k {
            continue;
        }
        nodes.sort_unstable();
        if h.accepts_nodes(g, &nodes) {
            return Ok(Subgraph::from_sorted_unchecked(nodes));
        }
    }
    Err(SeedNotFound { k, attempts: max_attempts })
}
