use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::supernode::SupernodeState;
use super::Model;
use crate::graph::AttributedGraph;
use crate::hon::hon_neighborhood;
use crate::relation::{AnchorProbe, FilterFn, RelationSpec};
use crate::subgraph::Subgraph;

/// One tour from the supernode back to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TourResult {
    /// `Σ g(S_i)·1{S_i R S} / |N(S_i)|` over interior steps.
    pub interior_sum: f64,
    /// Number of interior steps in the class, i.e. the same sum with
    /// `g = |N|`.
    pub interior_class_visits: f64,
    /// Number of states including both supernode endpoints.
    pub length: usize,
    pub truncated: bool,
    /// Same-pattern interior visits that could not be tied to the class.
    pub uncertified_visits: usize,
}

/// Picks a neighbor uniformly, excluding `prev` unless it is the only one.
fn next_non_backtracking<'n, R: Rng + ?Sized>(
    neighbors: &'n [Subgraph],
    prev: &Subgraph,
    rng: &mut R,
) -> &'n Subgraph {
    if neighbors.len() == 1 {
        return &neighbors[0];
    }
    let p = neighbors.binary_search(prev).expect("previous state is a neighbor");
    let mut i = rng.gen_range(0..neighbors.len() - 1);
    if i >= p {
        i += 1;
    }
    &neighbors[i]
}

/// Walks from a uniformly drawn boundary edge until the walk re-enters any
/// supernode member.
///
/// The walk is non-backtracking on the HON edges: it never returns along
/// the edge it just used unless the current state has degree one. Members
/// of the supernode are individual HON states, so the first interior state
/// may end the tour by stepping to a different member than the one it came
/// from.
pub(crate) fn run_tour<R: Rng + ?Sized>(
    model: &Model<'_>,
    sn: &SupernodeState,
    probe: &AnchorProbe<'_>,
    rng: &mut R,
    max_len: usize,
) -> TourResult {
    run_tour_traced(model, sn, probe, rng, max_len).0
}

/// Like [`run_tour`], also returning the percolation certification state
/// at the end of the tour.
pub(crate) fn run_tour_traced<R: Rng + ?Sized>(
    model: &Model<'_>,
    sn: &SupernodeState,
    probe: &AnchorProbe<'_>,
    rng: &mut R,
    max_len: usize,
) -> (TourResult, PercTrace) {
    let g = model.graph;
    let h = model.filter;
    let (mi, first) = &sn.boundary_edges[rng.gen_range(0..sn.boundary_degree())];
    let mut prev = sn.members[*mi as usize].clone();
    let mut cur = first.clone();
    let mut result = TourResult {
        interior_sum: 0.0,
        interior_class_visits: 0.0,
        length: 2,
        truncated: false,
        uncertified_visits: 0,
    };
    let mut perc = matches!(model.relation, RelationSpec::Perc).then(PercTracker::default);

    loop {
        let neighbors = hon_neighborhood(g, &cur, h);
        let degree = neighbors.len();
        let share = |s: &Subgraph| model.weight.eval_with_degree(g, s, degree) / degree as f64;
        match perc.as_mut() {
            Some(tracker) => {
                if probe.same_pattern(&cur) {
                    let share = share(&cur);
                    tracker.visit(sn, cur.clone(), &neighbors, share, &mut result);
                }
            }
            None => {
                if probe.related(&cur) {
                    result.interior_sum += share(&cur);
                    result.interior_class_visits += 1.0;
                }
            }
        }

        if result.length >= max_len {
            result.truncated = true;
            break;
        }
        let next = next_non_backtracking(&neighbors, &prev, rng).clone();
        result.length += 1;
        if sn.contains(&next) {
            break;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let mut trace = PercTrace::default();
    if let Some(tracker) = perc {
        result.uncertified_visits = tracker.pending.len();
        trace = PercTrace { certified: tracker.certified.into_iter().collect(), pending: tracker.pending };
    }
    (result, trace)
}

/// States a tour certified and the visits it left pending.
#[derive(Debug, Default)]
pub(crate) struct PercTrace {
    certified: Vec<Subgraph>,
    pending: Vec<(Subgraph, f64)>,
}

/// Credits pending visits of every tour that are tied, through `k-1`
/// shared nodes, to a state certified by any tour of the same run.
/// Repeats until nothing changes.
pub(crate) fn certify_across(model: &Model<'_>, tours: &mut [TourResult], traces: Vec<PercTrace>) {
    let mut known: HashSet<Subgraph> = HashSet::new();
    let mut pending: Vec<(usize, Subgraph, f64)> = Vec::new();
    for (t, trace) in traces.into_iter().enumerate() {
        known.extend(trace.certified);
        pending.extend(trace.pending.into_iter().map(|(s, share)| (t, s, share)));
    }
    if pending.is_empty() || known.is_empty() {
        return;
    }
    let mut neighbors: HashMap<Subgraph, Vec<Subgraph>> = HashMap::new();
    loop {
        let mut newly = Vec::new();
        pending.retain(|(t, s, share)| {
            let adj = neighbors.entry(s.clone()).or_insert_with(|| hon_neighborhood(model.graph, s, model.filter));
            if !known.contains(s) && !adj.iter().any(|n| known.contains(n)) {
                return true;
            }
            let tour = &mut tours[*t];
            tour.interior_sum += share;
            tour.interior_class_visits += 1.0;
            tour.uncertified_visits -= 1;
            newly.push(s.clone());
            false
        });
        if newly.is_empty() {
            break;
        }
        known.extend(newly);
    }
}

/// Percolation certification within one tour.
///
/// A same-pattern state is certified when a HON neighbor is a supernode
/// member or already certified in this tour. Uncertified visits are kept
/// and credited if a later certification reaches them; what is still
/// pending at the end goes to [`certify_across`].
#[derive(Default)]
struct PercTracker {
    certified: HashSet<Subgraph>,
    pending: Vec<(Subgraph, f64)>,
}

impl PercTracker {
    fn visit(
        &mut self,
        sn: &SupernodeState,
        s: Subgraph,
        neighbors: &[Subgraph],
        share: f64,
        result: &mut TourResult,
    ) {
        let known = self.certified.contains(&s)
            || neighbors.iter().any(|n| sn.contains(n) || self.certified.contains(n));
        if !known {
            self.pending.push((s, share));
            return;
        }
        result.interior_sum += share;
        result.interior_class_visits += 1.0;
        if !self.certified.insert(s.clone()) {
            return;
        }
        let k = s.size();
        let mut work = vec![s];
        while let Some(w) = work.pop() {
            let mut i = 0;
            while i < self.pending.len() {
                let p = &self.pending[i].0;
                if *p == w || p.overlap(&w) + 1 == k {
                    let (p, share) = self.pending.swap_remove(i);
                    result.interior_sum += share;
                    result.interior_class_visits += 1.0;
                    if self.certified.insert(p.clone()) {
                        work.push(p);
                    }
                } else {
                    i += 1;
                }
            }
        }
    }
}

/// A free-running non-backtracking walk on the `h`-restricted HON.
///
/// The walk never reverses the edge it just used unless the current state
/// has degree one. Its stationary distribution over states is proportional
/// to the HON degree.
#[derive(Debug, Clone)]
pub struct NonBacktrackingWalk<'g> {
    graph: &'g AttributedGraph,
    filter: FilterFn,
    prev: Option<Subgraph>,
    current: Subgraph,
}

impl<'g> NonBacktrackingWalk<'g> {
    pub fn new(graph: &'g AttributedGraph, start: Subgraph, filter: FilterFn) -> Self {
        Self { graph, filter, prev: None, current: start }
    }

    pub fn current(&self) -> &Subgraph {
        &self.current
    }

    /// Moves one step; `None` when the current state is isolated.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<&Subgraph> {
        let neighbors = hon_neighborhood(self.graph, &self.current, &self.filter);
        if neighbors.is_empty() {
            return None;
        }
        let next = match &self.prev {
            Some(prev) => next_non_backtracking(&neighbors, prev, rng).clone(),
            None => neighbors[rng.gen_range(0..neighbors.len())].clone(),
        };
        self.prev = Some(std::mem::replace(&mut self.current, next));
        Some(&self.current)
    }
}
