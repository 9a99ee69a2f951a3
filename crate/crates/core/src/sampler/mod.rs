//! Random-walk estimators.
//!
//! The lower layer estimates the weight `α` of one class. A bounded BFS
//! collects known members into a supernode; non-backtracking tours leave the
//! supernode through a uniformly drawn boundary edge and end when they
//! re-enter it. With `D` boundary edges and `q` tours,
//!
//! ```text
//! α̂ = (D / q) · Σ_r Σ_{interior i} g(S_i) · 1{S_i R S} / |N(S_i)|  +  Σ_{m ∈ supernode} g(m)
//! ```
//!
//! The upper layer runs a simple random walk over the HON and weights each
//! sample by `α̂₁ / α̂₂`, where `α̂₂` estimates `Σ |N(S')|` over the sample's
//! class. This undoes the walk's degree bias.

mod alpha;
mod festimate;
mod supernode;
mod tour;
mod upper;

use thiserror::Error;

use crate::enumerate::SeedNotFound;
use crate::exact::ExactError;
use crate::graph::AttributedGraph;
use crate::relation::{FilterFn, RelationSpec, WeightFn};
use crate::subgraph::Subgraph;

pub use alpha::{estimate_alpha, estimate_alpha_pair, AlphaConfig, AlphaEstimate, AlphaPair, DEFAULT_MAX_TOUR_LEN};
pub use festimate::{
    estimate_f, run_walk, sample_seed, ClassCache, ClassRecord, FAccumulator, FConfig, FEstimate, SampleRecord,
    Snapshot, StepCounts, DEFAULT_CERTIFIED_CAP,
};
pub use supernode::{build_supernode, SupernodeState};
pub use tour::{NonBacktrackingWalk, TourResult};
pub use upper::{default_burn_in, UpperWalk};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    SeedNotFound(#[from] SeedNotFound),
    #[error("the walk is stuck at {0}, which has no HON neighbors")]
    StuckAtIsolatedNode(Subgraph),
    #[error("supernode has no boundary edges")]
    NoBoundary,
    #[error("{count} tours exceeded {max_len} states")]
    TourTruncated { count: usize, max_len: usize },
    #[error("the class of {0} has zero total HON degree")]
    ZeroDegreeClass(Subgraph),
    #[error("tour count must be at least 1")]
    NoTours,
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// The graph with the relation, weight and filter under study.
#[derive(Clone, Copy)]
pub struct Model<'a> {
    pub graph: &'a AttributedGraph,
    pub relation: &'a RelationSpec,
    pub weight: &'a WeightFn,
    pub filter: &'a FilterFn,
}

impl<'a> Model<'a> {
    pub fn new(graph: &'a AttributedGraph, relation: &'a RelationSpec, weight: &'a WeightFn, filter: &'a FilterFn) -> Self {
        Self { graph, relation, weight, filter }
    }
}

/// Runs one tour with an explicit RNG.
pub fn run_tour<R: rand::Rng + ?Sized>(
    model: &Model<'_>,
    sn: &SupernodeState,
    rng: &mut R,
    max_len: usize,
) -> Result<TourResult, SamplerError> {
    if sn.boundary_degree() == 0 {
        return Err(SamplerError::NoBoundary);
    }
    let probe = crate::relation::AnchorProbe::new(model.relation, model.graph, &sn.anchor);
    Ok(tour::run_tour(model, sn, &probe, rng, max_len))
}

/// Runs `tours` tours from `sn`, tour `r` on stream `r` of `seed`.
///
/// For percolation, visits left uncertified by their own tour are credited
/// when they are tied to a state certified by another tour of the same run.
pub fn run_tours(
    model: &Model<'_>,
    sn: &SupernodeState,
    tours: usize,
    max_len: usize,
    seed: u64,
) -> Result<Vec<TourResult>, SamplerError> {
    if sn.boundary_degree() == 0 {
        return Err(SamplerError::NoBoundary);
    }
    Ok(alpha::tours_from(model, sn, tours, max_len, seed))
}
