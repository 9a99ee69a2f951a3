//! Class-based subgraph pattern statistics on node-labeled graphs.
//!
//! A subgraph relation groups the k-node connected induced subgraphs (CISes)
//! of a graph into classes. This crate computes the weight of a class, and a
//! per-pattern statistic aggregated over classes, either exactly or with
//! random-walk estimators on the high-order network (HON) of subgraphs.
//!
//! ```
//! use relmine::{generators, induced_subgraph, exact_alpha_bruteforce};
//! use relmine::{FilterFn, RelationSpec, WeightFn, DEFAULT_ENUMERATION_CAP};
//!
//! let g = generators::cycle(5);
//! let s = induced_subgraph(&g, &[0, 1, 2]).unwrap();
//! let alpha = exact_alpha_bruteforce(
//!     &g, &s, &RelationSpec::Perc, &WeightFn::Unit, &FilterFn::None, DEFAULT_ENUMERATION_CAP,
//! ).unwrap();
//! assert_eq!(alpha, 5.0);
//! ```

pub mod canon;
pub mod enumerate;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod hon;
pub mod relation;
pub mod rng;
pub mod subgraph;

pub use canon::{canonical_code, canonical_code_bounded, CanonError, PatternCode, DEFAULT_MAX_CANON_SIZE};
pub use enumerate::{enumerate_cis, for_each_cis, random_seed_subgraph, SeedNotFound};
pub use exact::{
    bounded_class_bfs, exact_alpha_bruteforce, exact_class, exact_f, partition_classes, BoundedClassResult,
    ExactError, ExactFReport, FMode, DEFAULT_ENUMERATION_CAP,
};
pub use graph::{AttributedGraph, GraphError, GraphFormat, Label, NodeId, Strictness};
pub use hon::{hon_degree, hon_neighborhood};
pub use relation::{
    class_membership_test, hubs, related_local, CertifiedSet, FilterFn, MembershipAnswer, RelationSpec, WeightFn,
};
pub use rng::{derive_rng, derive_seed};
pub use subgraph::{induced_subgraph, is_connected_set, Subgraph, SubgraphError};
pub mod runtime;
pub mod sampler;

pub use runtime::{run_job, JobConfig, JobError, JobOutput, RunMetrics};
pub use sampler::{
    estimate_alpha, estimate_alpha_pair, estimate_f, AlphaConfig, AlphaEstimate, FConfig, FEstimate, Model,
    SamplerError,
};

/// Guide chapters compiled as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub struct Graphs;
    #[doc = include_str!("../../../book/src/hon.md")]
    pub struct Hon;
    #[doc = include_str!("../../../book/src/relations.md")]
    pub struct Relations;
    #[doc = include_str!("../../../book/src/exact.md")]
    pub struct Exact;
    #[doc = include_str!("../../../book/src/alpha.md")]
    pub struct Alpha;
    #[doc = include_str!("../../../book/src/festimate.md")]
    pub struct Festimate;
    #[doc = include_str!("../../../book/src/runtime.md")]
    pub struct Runtime;
}
