//! Subgraph relations, weight functions and validity filters.
//!
//! Every built-in relation is an equivalence relation whose classes are
//! pattern-homogeneous:
//!
//! * [`RelationSpec::Identity`]: each CIS is its own class.
//! * [`RelationSpec::Perc`]: pattern percolation, the transitive closure of
//!   "share `k-1` nodes and have the same pattern".
//! * [`RelationSpec::SharedHubs`]: same pattern and the same set of host
//!   nodes with degree `>= d`.
//!
//! Percolation is not decidable from the pair alone, so estimators evaluate it
//! against a set of subgraphs already known to be in the class (see
//! [`CertifiedSet`]).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::canon::{code_unchecked, PatternCode};
use crate::graph::{AttributedGraph, NodeId};
use crate::hon::hon_neighborhood;
use crate::subgraph::Subgraph;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("cannot parse {what} from `{input}`: expected {expected}")]
pub struct ParseSpecError {
    pub what: &'static str,
    pub input: String,
    pub expected: &'static str,
}

pub type RelationPredicate = Arc<dyn Fn(&AttributedGraph, &Subgraph, &Subgraph) -> bool + Send + Sync>;
pub type WeightFunction = Arc<dyn Fn(&AttributedGraph, &Subgraph) -> f64 + Send + Sync>;
pub type FilterPredicate = Arc<dyn Fn(&AttributedGraph, &[NodeId]) -> bool + Send + Sync>;

/// An equivalence-isomorphic subgraph relation.
#[derive(Clone)]
pub enum RelationSpec {
    Identity,
    Perc,
    SharedHubs(usize),
    /// A caller-supplied equivalence. The predicate must be reflexive,
    /// symmetric, transitive and only relate isomorphic subgraphs.
    UserDefined { name: String, predicate: RelationPredicate },
}

impl RelationSpec {
    pub fn user_defined<F>(name: impl Into<String>, predicate: F) -> Self
    where
        F: Fn(&AttributedGraph, &Subgraph, &Subgraph) -> bool + Send + Sync + 'static,
    {
        Self::UserDefined { name: name.into(), predicate: Arc::new(predicate) }
    }

    /// True when membership cannot be decided from the pair alone.
    pub fn requires_class_context(&self) -> bool {
        matches!(self, Self::Perc)
    }

    /// True when every class is a single subgraph.
    pub fn is_singleton(&self) -> bool {
        matches!(self, Self::Identity)
    }
}

impl fmt::Debug for RelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelationSpec({self})")
    }
}

impl fmt::Display for RelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Perc => f.write_str("perc"),
            Self::SharedHubs(d) => write!(f, "sh:{d}"),
            Self::UserDefined { name, .. } => write!(f, "user:{name}"),
        }
    }
}

impl FromStr for RelationSpec {
    type Err = ParseSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSpecError { what: "relation", input: s.to_string(), expected: "identity, perc or sh:<d>" };
        match s.trim() {
            "identity" => Ok(Self::Identity),
            "perc" => Ok(Self::Perc),
            other => {
                let d = other.strip_prefix("sh:").ok_or_else(err)?;
                d.parse().map(Self::SharedHubs).map_err(|_| err())
            }
        }
    }
}

/// The per-subgraph weight `g`.
#[derive(Clone)]
pub enum WeightFn {
    /// `g ≡ 1`.
    Unit,
    /// `g(S) = |N(S)|` in the filtered HON.
    HonDegree,
    UserDefined { name: String, weight: WeightFunction },
}

impl WeightFn {
    pub fn user_defined<F>(name: impl Into<String>, weight: F) -> Self
    where
        F: Fn(&AttributedGraph, &Subgraph) -> f64 + Send + Sync + 'static,
    {
        Self::UserDefined { name: name.into(), weight: Arc::new(weight) }
    }

    pub fn eval(&self, g: &AttributedGraph, s: &Subgraph, h: &FilterFn) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::HonDegree => crate::hon::hon_degree(g, s, h) as f64,
            Self::UserDefined { weight, .. } => weight(g, s),
        }
    }

    /// Like [`eval`](Self::eval) when the filtered HON degree is already known.
    pub(crate) fn eval_with_degree(&self, g: &AttributedGraph, s: &Subgraph, degree: usize) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::HonDegree => degree as f64,
            Self::UserDefined { weight, .. } => weight(g, s),
        }
    }
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFn({self})")
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit => f.write_str("unit"),
            Self::HonDegree => f.write_str("hondeg"),
            Self::UserDefined { name, .. } => write!(f, "user:{name}"),
        }
    }
}

impl FromStr for WeightFn {
    type Err = ParseSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "unit" => Ok(Self::Unit),
            "hondeg" => Ok(Self::HonDegree),
            _ => Err(ParseSpecError { what: "weight", input: s.to_string(), expected: "unit or hondeg" }),
        }
    }
}

/// Validity filter `h` restricting the HON.
#[derive(Clone, Default)]
pub enum FilterFn {
    #[default]
    None,
    /// Every node has at least `t` neighbors inside the subgraph. With `k = 4`
    /// and `t = 2` this is the density-above-one-half quasi-clique filter.
    MinInternalDegree(usize),
    UserDefined { name: String, predicate: FilterPredicate },
}

impl FilterFn {
    pub fn user_defined<F>(name: impl Into<String>, predicate: F) -> Self
    where
        F: Fn(&AttributedGraph, &[NodeId]) -> bool + Send + Sync + 'static,
    {
        Self::UserDefined { name: name.into(), predicate: Arc::new(predicate) }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }

    /// Evaluates the filter on a sorted node set.
    pub fn accepts_nodes(&self, g: &AttributedGraph, nodes: &[NodeId]) -> bool {
        match self {
            Self::None => true,
            Self::MinInternalDegree(t) => nodes
                .iter()
                .all(|&u| nodes.iter().filter(|&&v| v != u && g.has_edge(u, v)).count() >= *t),
            Self::UserDefined { predicate, .. } => predicate(g, nodes),
        }
    }

    pub fn accepts(&self, g: &AttributedGraph, s: &Subgraph) -> bool {
        self.accepts_nodes(g, s.nodes())
    }
}

impl fmt::Debug for FilterFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FilterFn({self})")
    }
}

impl fmt::Display for FilterFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::MinInternalDegree(t) => write!(f, "min-internal-degree:{t}"),
            Self::UserDefined { name, .. } => write!(f, "user:{name}"),
        }
    }
}

impl FromStr for FilterFn {
    type Err = ParseSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSpecError {
            what: "filter",
            input: s.to_string(),
            expected: "none or min-internal-degree:<t>",
        };
        let body = s.trim();
        let body = body.strip_prefix("filter=").unwrap_or(body);
        match body {
            "none" => Ok(Self::None),
            other => {
                let t = other.strip_prefix("min-internal-degree:").ok_or_else(err)?;
                t.parse().map(Self::MinInternalDegree).map_err(|_| err())
            }
        }
    }
}

/// Nodes of `s` whose host-graph degree is at least `d`, ascending.
pub fn hubs(g: &AttributedGraph, s: &Subgraph, d: usize) -> Vec<NodeId> {
    s.nodes().iter().copied().filter(|&v| g.degree(v) >= d).collect()
}

/// The pairwise clause of a relation.
///
/// For [`RelationSpec::Perc`] this is only the local step (equal, or sharing
/// `k-1` nodes with the same pattern); class membership is its transitive
/// closure.
pub fn related_local(rel: &RelationSpec, g: &AttributedGraph, a: &Subgraph, b: &Subgraph) -> bool {
    if a == b {
        return true;
    }
    match rel {
        RelationSpec::Identity => false,
        RelationSpec::Perc => {
            a.size() == b.size()
                && a.overlap(b) + 1 == a.size()
                && code_unchecked(g, a) == code_unchecked(g, b)
        }
        RelationSpec::SharedHubs(d) => {
            hubs(g, a, *d) == hubs(g, b, *d) && code_unchecked(g, a) == code_unchecked(g, b)
        }
        RelationSpec::UserDefined { predicate, .. } => predicate(g, a, b),
    }
}

/// Outcome of testing a candidate against an anchor's class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipAnswer {
    Yes,
    No,
    /// Possibly in the class but not reachable from certified members.
    /// Estimators count it as outside the class.
    Uncertified,
}

impl MembershipAnswer {
    pub fn is_yes(self) -> bool {
        self == Self::Yes
    }
}

/// Subgraphs known to belong to one class, with a size cap.
///
/// Once the cap is reached further certifications are still answered `Yes`
/// but no longer stored; `overflow` counts them.
#[derive(Debug, Clone)]
pub struct CertifiedSet {
    members: HashSet<Subgraph>,
    order: Vec<Subgraph>,
    cap: usize,
    overflow: usize,
}

impl CertifiedSet {
    pub fn new(cap: usize) -> Self {
        Self { members: HashSet::new(), order: Vec::new(), cap, overflow: 0 }
    }

    pub fn with_members<I: IntoIterator<Item = Subgraph>>(members: I, cap: usize) -> Self {
        let mut set = Self::new(cap);
        for m in members {
            set.insert(m);
        }
        set
    }

    /// Stores `s`; returns false if it was present or the cap was hit.
    pub fn insert(&mut self, s: Subgraph) -> bool {
        if self.members.contains(&s) {
            return false;
        }
        if self.members.len() >= self.cap {
            self.overflow += 1;
            return false;
        }
        self.members.insert(s.clone());
        self.order.push(s);
        true
    }

    pub fn contains(&self, s: &Subgraph) -> bool {
        self.members.contains(s)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn overflow(&self) -> usize {
        self.overflow
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[Subgraph] {
        &self.order
    }
}

/// Tests whether `candidate` is in the class of `anchor`.
///
/// `certified` must only contain members of that class. For percolation a
/// candidate is accepted when it is certified already or percolates to a
/// certified member, in which case it is certified in turn.
pub fn class_membership_test(
    rel: &RelationSpec,
    g: &AttributedGraph,
    anchor: &Subgraph,
    candidate: &Subgraph,
    certified: &mut CertifiedSet,
) -> MembershipAnswer {
    if certified.contains(candidate) || anchor == candidate {
        return MembershipAnswer::Yes;
    }
    match rel {
        RelationSpec::Perc => {
            if code_unchecked(g, anchor) != code_unchecked(g, candidate) {
                return MembershipAnswer::No;
            }
            let k = candidate.size();
            let adjacent_certified = if certified.len() <= 64 {
                certified.members().iter().any(|m| m.overlap(candidate) + 1 == k)
                    || anchor.overlap(candidate) + 1 == k
            } else {
                hon_neighborhood(g, candidate, &FilterFn::None)
                    .iter()
                    .any(|n| n == anchor || certified.contains(n))
            };
            if adjacent_certified {
                certified.insert(candidate.clone());
                MembershipAnswer::Yes
            } else {
                MembershipAnswer::Uncertified
            }
        }
        _ => {
            if related_local(rel, g, anchor, candidate) {
                MembershipAnswer::Yes
            } else {
                MembershipAnswer::No
            }
        }
    }
}

/// Anchor-side data cached for repeated membership tests.
pub(crate) struct AnchorProbe<'a> {
    pub rel: &'a RelationSpec,
    pub g: &'a AttributedGraph,
    pub anchor: Subgraph,
    pub code: PatternCode,
    hubs: Vec<NodeId>,
}

impl<'a> AnchorProbe<'a> {
    pub fn new(rel: &'a RelationSpec, g: &'a AttributedGraph, anchor: &Subgraph) -> Self {
        let code = code_unchecked(g, anchor);
        let hubs = match rel {
            RelationSpec::SharedHubs(d) => hubs(g, anchor, *d),
            _ => Vec::new(),
        };
        Self { rel, g, anchor: anchor.clone(), code, hubs }
    }

    pub fn same_pattern(&self, s: &Subgraph) -> bool {
        code_unchecked(self.g, s) == self.code
    }

    /// Exact pairwise test against the anchor; for percolation only the
    /// local clause.
    pub fn related(&self, s: &Subgraph) -> bool {
        if *s == self.anchor {
            return true;
        }
        match self.rel {
            RelationSpec::Identity => false,
            RelationSpec::SharedHubs(d) => {
                s.nodes().iter().copied().filter(|&v| self.g.degree(v) >= *d).eq(self.hubs.iter().copied())
                    && self.same_pattern(s)
            }
            RelationSpec::Perc => s.overlap(&self.anchor) + 1 == s.size() && self.same_pattern(s),
            RelationSpec::UserDefined { predicate, .. } => predicate(self.g, &self.anchor, s),
        }
    }
}
