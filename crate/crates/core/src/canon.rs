//! Canonical pattern codes for small labeled subgraphs.
//!
//! A code is the byte string
//!
//! ```text
//! [k: u8] [labels: k × u32 big-endian, ascending] [adjacency bits, MSB first]
//! ```
//!
//! Nodes are ordered by label; within each label class every permutation is
//! tried and the one giving the lexicographically smallest adjacency bit
//! string wins. Bits cover the upper triangle column by column, i.e. pairs
//! `(0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...`, so the first `p(p-1)/2`
//! bits only depend on the first `p` placed nodes and partial orderings can
//! be pruned as soon as their prefix exceeds the best one found.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{AttributedGraph, Label, NodeId};
use crate::subgraph::Subgraph;

/// Default upper bound on `k` for canonicalization.
pub const DEFAULT_MAX_CANON_SIZE: usize = 8;

/// Hard limit: the adjacency bits of `k` nodes must fit in a `u64`.
pub const MAX_CANON_SIZE: usize = 11;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("subgraph has {size} nodes; canonical codes support at most {max}")]
    SubgraphTooLarge { size: usize, max: usize },
    #[error("malformed pattern code: {0}")]
    Malformed(String),
}

/// Canonical code of a labeled subgraph. Equal codes ⇔ attributed-isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternCode(Box<[u8]>);

impl PatternCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Number of nodes of the pattern.
    pub fn size(&self) -> usize {
        self.0[0] as usize
    }

    /// Sorted label multiset.
    pub fn labels(&self) -> Vec<Label> {
        let k = self.size();
        (0..k)
            .map(|i| {
                let b = &self.0[1 + 4 * i..5 + 4 * i];
                u32::from_be_bytes([b[0], b[1], b[2], b[3]])
            })
            .collect()
    }

    fn bit(&self, index: usize) -> bool {
        let base = 1 + 4 * self.size();
        (self.0[base + index / 8] >> (7 - index % 8)) & 1 == 1
    }

    /// Edges `(i, j)`, `i < j`, between canonical positions.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.size();
        let mut out = Vec::new();
        for j in 1..k {
            for i in 0..j {
                if self.bit(pair_index(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Edge density `|E| / C(k, 2)`.
    pub fn density(&self) -> f64 {
        let k = self.size();
        if k < 2 {
            return 0.0;
        }
        self.edge_count() as f64 / (k * (k - 1) / 2) as f64
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str) -> Result<Self, CanonError> {
        if hex.len() % 2 != 0 {
            return Err(CanonError::Malformed("odd number of hex digits".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|e| CanonError::Malformed(e.to_string()))?;
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self, CanonError> {
        let Some(&k) = bytes.first() else {
            return Err(CanonError::Malformed("empty code".into()));
        };
        let k = k as usize;
        let pairs = k * k.saturating_sub(1) / 2;
        let expected = 1 + 4 * k + pairs.div_ceil(8);
        if bytes.len() != expected {
            return Err(CanonError::Malformed(format!(
                "expected {expected} bytes for k={k}, got {}",
                bytes.len()
            )));
        }
        Ok(Self(bytes.into_boxed_slice()))
    }

    /// `k|l0,l1,...|hexbits` rendering.
    pub fn compact(&self) -> String {
        let labels: Vec<String> = self.labels().iter().map(u32::to_string).collect();
        let base = 1 + 4 * self.size();
        let bits: String = self.0[base..].iter().map(|b| format!("{b:02x}")).collect();
        format!("{}|{}|{}", self.size(), labels.join(","), bits)
    }

    /// Human readable edge list over canonical positions, e.g. `0-1 0-2`.
    pub fn edge_list(&self) -> String {
        let parts: Vec<String> = self.edges().iter().map(|(i, j)| format!("{i}-{j}")).collect();
        parts.join(" ")
    }
}

impl fmt::Debug for PatternCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternCode({})", self.compact())
    }
}

impl fmt::Display for PatternCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for PatternCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for PatternCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PatternCode::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

/// Canonical code with the default size bound.
pub fn canonical_code(g: &AttributedGraph, s: &Subgraph) -> Result<PatternCode, CanonError> {
    canonical_code_bounded(g, s.nodes(), DEFAULT_MAX_CANON_SIZE)
}

/// Canonical code of the subgraph induced by `nodes`, refusing `k > max_size`.
pub fn canonical_code_bounded(
    g: &AttributedGraph,
    nodes: &[NodeId],
    max_size: usize,
) -> Result<PatternCode, CanonError> {
    let k = nodes.len();
    let max = max_size.min(MAX_CANON_SIZE);
    if k > max || k > u8::MAX as usize {
        return Err(CanonError::SubgraphTooLarge { size: k, max });
    }
    let mut adj = [0u16; MAX_CANON_SIZE];
    for i in 0..k {
        for j in i + 1..k {
            if g.has_edge(nodes[i], nodes[j]) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let labels: Vec<Label> = nodes.iter().map(|&v| g.label(v)).collect();
    Ok(code_from_local(&labels, &adj[..k]))
}

/// Infallible variant for callers that already validated `k`.
pub(crate) fn code_unchecked(g: &AttributedGraph, s: &Subgraph) -> PatternCode {
    canonical_code_bounded(g, s.nodes(), MAX_CANON_SIZE)
        .expect("subgraph size validated against MAX_CANON_SIZE")
}

struct Search<'a> {
    k: usize,
    adj: &'a [u16],
    slot_labels: Vec<Label>,
    node_labels: &'a [Label],
    order: Vec<usize>,
    used: u16,
    best: Option<u64>,
    total_bits: usize,
}

impl Search<'_> {
    fn run(&mut self, pos: usize, prefix: u64) {
        if pos == self.k {
            if self.best.is_none_or(|b| prefix < b) {
                self.best = Some(prefix);
            }
            return;
        }
        let want = self.slot_labels[pos];
        for v in 0..self.k {
            if self.used & (1 << v) != 0 || self.node_labels[v] != want {
                continue;
            }
            let mut row = 0u64;
            for i in 0..pos {
                row <<= 1;
                if self.adj[self.order[i]] & (1 << v) != 0 {
                    row |= 1;
                }
            }
            let next = (prefix << pos) | row;
            let placed_bits = (pos + 1) * pos / 2;
            if let Some(best) = self.best {
                let best_prefix = best >> (self.total_bits - placed_bits);
                if next > best_prefix {
                    continue;
                }
            }
            self.order.push(v);
            self.used |= 1 << v;
            self.run(pos + 1, next);
            self.used &= !(1 << v);
            self.order.pop();
        }
    }
}

fn code_from_local(labels: &[Label], adj: &[u16]) -> PatternCode {
    let k = labels.len();
    let mut slot_labels = labels.to_vec();
    slot_labels.sort_unstable();
    let total_bits = k * k.saturating_sub(1) / 2;
    let mut search = Search {
        k,
        adj,
        slot_labels: slot_labels.clone(),
        node_labels: labels,
        order: Vec::with_capacity(k),
        used: 0,
        best: None,
        total_bits,
    };
    search.run(0, 0);
    let bits = search.best.unwrap_or(0);

    let mut bytes = Vec::with_capacity(1 + 4 * k + total_bits.div_ceil(8));
    bytes.push(k as u8);
    for l in &slot_labels {
        bytes.extend_from_slice(&l.to_be_bytes());
    }
    let mut packed = vec![0u8; total_bits.div_ceil(8)];
    for idx in 0..total_bits {
        if (bits >> (total_bits - 1 - idx)) & 1 == 1 {
            packed[idx / 8] |= 1 << (7 - idx % 8);
        }
    }
    bytes.extend_from_slice(&packed);
    PatternCode(bytes.into_boxed_slice())
}
