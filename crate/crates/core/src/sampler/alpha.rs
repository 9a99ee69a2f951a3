use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::supernode::{build_supernode, SupernodeState};
use super::tour::{certify_across, run_tour_traced, TourResult};
use super::{Model, SamplerError};
use crate::exact::{bounded_class_bfs, ExactError};
use crate::hon::hon_degree;
use crate::relation::AnchorProbe;
use crate::rng::derive_rng;
use crate::subgraph::Subgraph;

/// Default tour length limit, in states.
pub const DEFAULT_MAX_TOUR_LEN: usize = 10_000_000;

/// Parameters of the class-weight estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaConfig {
    /// BFS budget `B`.
    pub budget: usize,
    /// Number of tours `q`.
    pub tours: usize,
    pub max_tour_len: usize,
    /// Keep truncated tours instead of failing.
    pub allow_truncation: bool,
    /// Skip the BFS for relations whose classes are singletons.
    pub singleton_shortcut: bool,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        Self {
            budget: 1000,
            tours: 100,
            max_tour_len: DEFAULT_MAX_TOUR_LEN,
            allow_truncation: false,
            singleton_shortcut: true,
        }
    }
}

/// One class-weight estimate with its accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub value: f64,
    pub tours_used: usize,
    /// Mean of the per-tour terms `D · Σ_interior`.
    pub tour_mean: f64,
    /// Standard error of `tour_mean`.
    pub tour_stderr: f64,
    /// The class was covered without sampling.
    pub exact: bool,
    /// The BFS stopped early but no edge leaves the supernode.
    pub degenerate: bool,
    /// BFS visits plus the summed tour lengths.
    pub steps_total: usize,
    pub bfs_visited: usize,
    pub supernode_size: usize,
    pub boundary_degree: usize,
    pub tour_len_mean: f64,
    pub tour_len_max: usize,
    pub truncated_tours: usize,
    pub uncertified_visits: usize,
}

/// Estimates sharing one BFS and one set of tours: `first` uses the model's
/// weight, `second` uses `g = |N|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPair {
    pub first: AlphaEstimate,
    pub second: AlphaEstimate,
    /// Class members known after the BFS.
    pub members: Vec<Subgraph>,
}

fn exact_pair(value1: f64, value2: f64, bfs_visited: usize, members: Vec<Subgraph>, degenerate: bool) -> AlphaPair {
    let est = |value| AlphaEstimate {
        value,
        tours_used: 0,
        tour_mean: 0.0,
        tour_stderr: 0.0,
        exact: !degenerate,
        degenerate,
        steps_total: bfs_visited,
        bfs_visited,
        supernode_size: members.len(),
        boundary_degree: 0,
        tour_len_mean: 0.0,
        tour_len_max: 0,
        truncated_tours: 0,
        uncertified_visits: 0,
    };
    AlphaPair { first: est(value1), second: est(value2), members }
}

/// Class-weight estimate of the anchor's class with the model's weight.
pub fn estimate_alpha(model: &Model<'_>, anchor: &Subgraph, cfg: &AlphaConfig, seed: u64) -> Result<AlphaEstimate, SamplerError> {
    estimate_alpha_pair(model, anchor, cfg, seed).map(|p| p.first)
}

/// Runs the bounded BFS, collapses the members found into a supernode and
/// averages `q` tours from it. Tour `r` draws from stream `r` of `seed`.
pub fn estimate_alpha_pair(
    model: &Model<'_>,
    anchor: &Subgraph,
    cfg: &AlphaConfig,
    seed: u64,
) -> Result<AlphaPair, SamplerError> {
    let (g, h) = (model.graph, model.filter);
    if !h.accepts(g, anchor) {
        return Err(ExactError::InvalidStart(anchor.clone()).into());
    }
    if cfg.singleton_shortcut && model.relation.is_singleton() {
        let degree = hon_degree(g, anchor, h);
        let value = model.weight.eval_with_degree(g, anchor, degree);
        return Ok(exact_pair(value, degree as f64, 0, vec![anchor.clone()], false));
    }
    let bfs = bounded_class_bfs(g, anchor, model.relation, cfg.budget, model.weight, h)?;
    if bfs.complete {
        let degrees: f64 = bfs.members.iter().map(|m| hon_degree(g, m, h) as f64).sum();
        return Ok(exact_pair(bfs.alpha_partial, degrees, bfs.visited_count, bfs.members, false));
    }
    let sn = build_supernode(g, anchor, &bfs, h);
    if sn.boundary_degree() == 0 {
        return Ok(exact_pair(sn.alpha_inside, sn.degree_inside, bfs.visited_count, bfs.members, true));
    }
    if cfg.tours == 0 {
        return Err(SamplerError::NoTours);
    }
    let tours = tours_from(model, &sn, cfg.tours, cfg.max_tour_len, seed);
    let truncated = tours.iter().filter(|t| t.truncated).count();
    if truncated > 0 && !cfg.allow_truncation {
        return Err(SamplerError::TourTruncated { count: truncated, max_len: cfg.max_tour_len });
    }
    Ok(combine(&sn, &tours, bfs.visited_count))
}

pub(crate) fn tours_from(model: &Model<'_>, sn: &SupernodeState, tours: usize, max_len: usize, seed: u64) -> Vec<TourResult> {
    let probe = AnchorProbe::new(model.relation, model.graph, &sn.anchor);
    let (mut results, traces): (Vec<TourResult>, Vec<_>) = (0..tours as u64)
        .into_par_iter()
        .map(|r| run_tour_traced(model, sn, &probe, &mut derive_rng(seed, r), max_len))
        .unzip();
    certify_across(model, &mut results, traces);
    results
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn combine(sn: &SupernodeState, tours: &[TourResult], bfs_visited: usize) -> AlphaPair {
    let q = tours.len();
    let d = sn.boundary_degree() as f64;
    let lengths: usize = tours.iter().map(|t| t.length).sum();
    let base = AlphaEstimate {
        value: 0.0,
        tours_used: q,
        tour_mean: 0.0,
        tour_stderr: 0.0,
        exact: false,
        degenerate: false,
        steps_total: bfs_visited + lengths,
        bfs_visited,
        supernode_size: sn.len(),
        boundary_degree: sn.boundary_degree(),
        tour_len_mean: lengths as f64 / q as f64,
        tour_len_max: tours.iter().map(|t| t.length).max().unwrap_or(0),
        truncated_tours: tours.iter().filter(|t| t.truncated).count(),
        uncertified_visits: tours.iter().map(|t| t.uncertified_visits).sum(),
    };
    let finish = |terms: Vec<f64>, inside: f64| {
        let (mean, stderr) = mean_and_stderr(terms.iter().copied(), q);
        AlphaEstimate { value: mean + inside, tour_mean: mean, tour_stderr: stderr, ..base.clone() }
    };
    AlphaPair {
        first: finish(tours.iter().map(|t| d * t.interior_sum).collect(), sn.alpha_inside),
        second: finish(tours.iter().map(|t| d * t.interior_class_visits).collect(), sn.degree_inside),
        members: sn.members.clone(),
    }
}
