//! Exact class computations: the budget-bounded class BFS used to seed the
//! estimators, and brute-force oracles over the full CIS enumeration.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{code_unchecked, PatternCode};
use crate::enumerate::for_each_cis;
use crate::graph::AttributedGraph;
use crate::hon::hon_neighborhood;
use crate::relation::{hubs, related_local, AnchorProbe, FilterFn, RelationSpec, WeightFn};
use crate::subgraph::Subgraph;

/// Default cap on the number of CISes the brute-force oracles may enumerate.
pub const DEFAULT_ENUMERATION_CAP: usize = 2_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("start subgraph {0} is rejected by the filter")]
    InvalidStart(Subgraph),
    #[error("more than {cap} subgraphs to enumerate")]
    EnumerationCapExceeded { cap: usize },
}

/// Output of [`bounded_class_bfs`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedClassResult {
    /// Sum of `g` over `members`.
    pub alpha_partial: f64,
    /// Class members found, in discovery order; the start comes first.
    pub members: Vec<Subgraph>,
    /// True when the HON component of the start was exhausted.
    pub complete: bool,
    /// Number of subgraphs in the visited set, start included.
    pub visited_count: usize,
}

/// Breadth-first search over the `h`-restricted HON from `s`, visiting at
/// most `budget` subgraphs and collecting those related to `s`.
///
/// `s` itself is counted in the visited set and in the class. Percolation is
/// certified against members found so far; a same-pattern subgraph seen
/// before its certifying neighbor is credited once that neighbor joins, so
/// with an unlimited budget the result is the exact percolation class.
pub fn bounded_class_bfs(
    g: &AttributedGraph,
    s: &Subgraph,
    rel: &RelationSpec,
    budget: usize,
    gfn: &WeightFn,
    h: &FilterFn,
) -> Result<BoundedClassResult, ExactError> {
    if !h.accepts(g, s) {
        return Err(ExactError::InvalidStart(s.clone()));
    }
    let budget = budget.max(1);
    let probe = AnchorProbe::new(rel, g, s);
    let k = s.size();

    let mut visited: HashSet<Subgraph> = HashSet::from([s.clone()]);
    let mut queue: VecDeque<Subgraph> = VecDeque::from([s.clone()]);
    let mut result = BoundedClassResult {
        alpha_partial: gfn.eval(g, s, h),
        members: vec![s.clone()],
        complete: false,
        visited_count: 1,
    };
    let mut certified: HashSet<Subgraph> = HashSet::from([s.clone()]);
    let mut pending: HashSet<Subgraph> = HashSet::new();

    while let Some(current) = queue.pop_front() {
        for next in hon_neighborhood(g, &current, h) {
            if visited.contains(&next) {
                continue;
            }
            if visited.len() >= budget {
                result.visited_count = visited.len();
                return Ok(result);
            }
            visited.insert(next.clone());
            queue.push_back(next.clone());

            if rel.requires_class_context() {
                if probe.same_pattern(&next) {
                    let adjacent = hon_neighborhood(g, &next, h).iter().any(|n| certified.contains(n));
                    if adjacent {
                        certify_perc(g, h, k, next, gfn, &mut certified, &mut pending, &mut result);
                    } else {
                        pending.insert(next);
                    }
                }
            } else if probe.related(&next) {
                result.alpha_partial += gfn.eval(g, &next, h);
                result.members.push(next);
            }

            if visited.len() == budget {
                result.visited_count = visited.len();
                return Ok(result);
            }
        }
    }
    result.visited_count = visited.len();
    result.complete = true;
    Ok(result)
}

/// Adds `start` to the percolation class and pulls in every pending
/// subgraph that becomes reachable through it.
#[allow(clippy::too_many_arguments)]
fn certify_perc(
    g: &AttributedGraph,
    h: &FilterFn,
    k: usize,
    start: Subgraph,
    gfn: &WeightFn,
    certified: &mut HashSet<Subgraph>,
    pending: &mut HashSet<Subgraph>,
    result: &mut BoundedClassResult,
) {
    let mut work = vec![start];
    while let Some(m) = work.pop() {
        if !certified.insert(m.clone()) {
            continue;
        }
        result.alpha_partial += gfn.eval(g, &m, h);
        result.members.push(m.clone());
        if pending.is_empty() {
            continue;
        }
        if pending.len() <= 32 {
            let ready: Vec<Subgraph> = pending.iter().filter(|p| p.overlap(&m) + 1 == k).cloned().collect();
            for p in ready {
                pending.remove(&p);
                work.push(p);
            }
        } else {
            for n in hon_neighborhood(g, &m, h) {
                if pending.remove(&n) {
                    work.push(n);
                }
            }
        }
    }
}

/// Every k-node CIS accepted by `h`, or an error beyond `cap`.
pub fn enumerate_universe(
    g: &AttributedGraph,
    k: usize,
    h: &FilterFn,
    cap: usize,
) -> Result<Vec<Subgraph>, ExactError> {
    let mut out = Vec::new();
    let mut over = false;
    for_each_cis(g, k, h, |s| {
        if out.len() >= cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(s.clone());
        ControlFlow::Continue(())
    });
    if over {
        return Err(ExactError::EnumerationCapExceeded { cap });
    }
    out.sort_unstable();
    Ok(out)
}

/// The full class of `s` among the `h`-valid k-CISes, sorted.
pub fn exact_class(
    g: &AttributedGraph,
    s: &Subgraph,
    rel: &RelationSpec,
    h: &FilterFn,
    cap: usize,
) -> Result<Vec<Subgraph>, ExactError> {
    let universe = enumerate_universe(g, s.size(), h, cap)?;
    let classes = partition_classes_of(g, &universe, rel, h);
    let idx = universe.binary_search(s).map_err(|_| ExactError::InvalidStart(s.clone()))?;
    let root = classes.find_root(idx);
    let mut class: Vec<Subgraph> =
        (0..universe.len()).filter(|&i| classes.find_root(i) == root).map(|i| universe[i].clone()).collect();
    class.sort_unstable();
    Ok(class)
}

/// `Σ g` over the full class of `s`.
pub fn exact_alpha_bruteforce(
    g: &AttributedGraph,
    s: &Subgraph,
    rel: &RelationSpec,
    gfn: &WeightFn,
    h: &FilterFn,
    cap: usize,
) -> Result<f64, ExactError> {
    Ok(exact_class(g, s, rel, h, cap)?.iter().map(|m| gfn.eval(g, m, h)).sum())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn find_root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn partition_classes_of(
    g: &AttributedGraph,
    universe: &[Subgraph],
    rel: &RelationSpec,
    h: &FilterFn,
) -> UnionFind {
    let mut uf = UnionFind::new(universe.len());
    match rel {
        RelationSpec::Identity => {}
        RelationSpec::SharedHubs(d) => {
            let mut first: HashMap<(PatternCode, Vec<u32>), usize> = HashMap::new();
            for (i, s) in universe.iter().enumerate() {
                let key = (code_unchecked(g, s), hubs(g, s, *d));
                let j = *first.entry(key).or_insert(i);
                uf.union(i, j);
            }
        }
        RelationSpec::Perc => {
            let codes: Vec<PatternCode> = universe.iter().map(|s| code_unchecked(g, s)).collect();
            for (i, s) in universe.iter().enumerate() {
                for n in hon_neighborhood(g, s, h) {
                    if let Ok(j) = universe.binary_search(&n) {
                        if codes[i] == codes[j] {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
        RelationSpec::UserDefined { .. } => {
            let codes: Vec<PatternCode> = universe.iter().map(|s| code_unchecked(g, s)).collect();
            for i in 0..universe.len() {
                for j in i + 1..universe.len() {
                    if codes[i] == codes[j] && related_local(rel, g, &universe[i], &universe[j]) {
                        uf.union(i, j);
                    }
                }
            }
        }
    }
    uf
}

/// Partition of the `h`-valid k-CISes into classes. Classes are sorted
/// internally and ordered by their smallest member.
pub fn partition_classes(
    g: &AttributedGraph,
    k: usize,
    rel: &RelationSpec,
    h: &FilterFn,
    cap: usize,
) -> Result<Vec<Vec<Subgraph>>, ExactError> {
    let universe = enumerate_universe(g, k, h, cap)?;
    let mut uf = partition_classes_of(g, &universe, rel, h);
    let mut by_root: BTreeMap<usize, Vec<Subgraph>> = BTreeMap::new();
    for (i, s) in universe.iter().enumerate() {
        by_root.entry(uf.find(i)).or_default().push(s.clone());
    }
    Ok(by_root.into_values().collect())
}

/// What each class contributes to the pattern statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FMode {
    /// Class weight `α = Σ g` over the class.
    #[default]
    Standard,
    /// Every class counts once (`g = 1/|C|`).
    Mcc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternTotals {
    pub f: f64,
    pub classes: usize,
    pub subgraphs: usize,
}

/// Exact pattern statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFReport {
    pub patterns: BTreeMap<PatternCode, PatternTotals>,
    pub lambda: f64,
    pub class_count: usize,
    pub subgraph_count: usize,
}

impl ExactFReport {
    pub fn f_map(&self) -> BTreeMap<PatternCode, f64> {
        self.patterns.iter().map(|(p, t)| (p.clone(), t.f)).collect()
    }
}

/// Exact per-pattern statistic `F(P)` over all `h`-valid k-CISes.
pub fn exact_f(
    g: &AttributedGraph,
    k: usize,
    rel: &RelationSpec,
    gfn: &WeightFn,
    h: &FilterFn,
    mode: FMode,
    cap: usize,
) -> Result<ExactFReport, ExactError> {
    let classes = partition_classes(g, k, rel, h, cap)?;
    let mut patterns: BTreeMap<PatternCode, PatternTotals> = BTreeMap::new();
    let mut lambda = 0.0;
    let mut subgraph_count = 0;
    for class in &classes {
        let alpha = match mode {
            FMode::Standard => class.iter().map(|m| gfn.eval(g, m, h)).sum(),
            FMode::Mcc => 1.0,
        };
        let entry = patterns
            .entry(code_unchecked(g, &class[0]))
            .or_insert(PatternTotals { f: 0.0, classes: 0, subgraphs: 0 });
        entry.f += alpha;
        entry.classes += 1;
        entry.subgraphs += class.len();
        lambda += alpha;
        subgraph_count += class.len();
    }
    if lambda > 0.0 {
        for t in patterns.values_mut() {
            t.f /= lambda;
        }
    }
    Ok(ExactFReport { patterns, lambda, class_count: classes.len(), subgraph_count })
}
