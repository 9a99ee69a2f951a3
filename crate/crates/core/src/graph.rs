//! Immutable node-labeled undirected graphs and the `.lg` text format.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! v <id> <label>
//! e <u> <v>
//! ```
//!
//! Node ids are dense and 0-based. Every `e` line must reference declared
//! nodes. Duplicate edges and self-loops are rejected in strict mode and
//! silently dropped otherwise.

use std::io::BufRead;

use thiserror::Error;

/// Dense node identifier.
pub type NodeId = u32;

/// Integer node attribute.
pub type Label = u32;

#[derive(Error, Debug)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: label `{token}` is not a non-negative integer")]
    BadLabel { line: usize, token: String },
    #[error("line {line}: edge endpoint {node} is not a declared node")]
    DanglingEndpoint { line: usize, node: u64 },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: NodeId, v: NodeId },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: NodeId },
    #[error("node ids must be dense: expected {expected}, found {found}")]
    SparseIds { expected: usize, found: u64 },
    #[error("edge {u}-{v} references a node outside [0, {node_count})")]
    OutOfRange { u: NodeId, v: NodeId, node_count: usize },
    #[error("I/O error reading graph")]
    Io(#[from] std::io::Error),
}

/// Supported input encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphFormat {
    /// `v <id> <label>` / `e <u> <v>` lines.
    #[default]
    Lg,
}

/// How malformed-but-recoverable input is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Duplicate edges and self-loops are errors.
    #[default]
    Strict,
    /// Duplicate edges and self-loops are dropped.
    Lenient,
}

/// Undirected graph with one integer label per node.
///
/// Adjacency lists are sorted and free of duplicates and self-loops. The
/// structure never changes after construction and is shared read-only by all
/// workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedGraph {
    adjacency: Vec<Vec<NodeId>>,
    labels: Vec<Label>,
    label_count: usize,
    edge_count: usize,
}

impl AttributedGraph {
    /// Builds a graph from labels and an edge list.
    pub fn from_edges(
        labels: Vec<Label>,
        edges: &[(NodeId, NodeId)],
        strictness: Strictness,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::OutOfRange { u, v, node_count: n });
            }
            if u == v {
                if strictness == Strictness::Strict {
                    return Err(GraphError::SelfLoop { line: i + 1, node: u });
                }
                continue;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                if strictness == Strictness::Strict {
                    return Err(GraphError::DuplicateEdge { line: i + 1, u: u.min(v), v: u.max(v) });
                }
                continue;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        Ok(Self::finish(labels, adjacency))
    }

    /// Unlabeled convenience constructor: every node gets label 0.
    pub fn unlabeled(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        Self::from_edges(vec![0; node_count], edges, Strictness::Strict)
    }

    fn finish(labels: Vec<Label>, mut adjacency: Vec<Vec<NodeId>>) -> Self {
        let mut twice_edges = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            twice_edges += list.len();
        }
        let label_count = {
            let mut distinct = labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        };
        Self { adjacency, labels, label_count, edge_count: twice_edges / 2 }
    }

    /// Parses a graph from a reader in the given format.
    pub fn load<R: BufRead>(
        source: R,
        format: GraphFormat,
        strictness: Strictness,
    ) -> Result<Self, GraphError> {
        match format {
            GraphFormat::Lg => parse_lg(source, strictness),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of distinct labels in use.
    pub fn label_count(&self) -> usize {
        self.label_count
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v as usize].len()
    }

    #[inline]
    pub fn label(&self, v: NodeId) -> Label {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Iterates every edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeId;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Serializes in `.lg` format. `load` of the output reproduces `self`.
    pub fn to_lg(&self) -> String {
        let mut out = String::new();
        for (v, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("v {v} {l}\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("e {u} {v}\n"));
        }
        out
    }
}

fn parse_lg<R: BufRead>(source: R, strictness: Strictness) -> Result<AttributedGraph, GraphError> {
    let mut labels: Vec<Label> = Vec::new();
    let mut adjacency: Vec<Vec<NodeId>> = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        let a = parts.next();
        let b = parts.next();
        if parts.next().is_some() {
            return Err(GraphError::Parse { line: line_no, message: "too many fields".into() });
        }
        let (Some(a), Some(b)) = (a, b) else {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected `{tag} <a> <b>`"),
            });
        };
        match tag {
            "v" => {
                let id: u64 = a.parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    message: format!("node id `{a}` is not an integer"),
                })?;
                if id != labels.len() as u64 {
                    return Err(GraphError::SparseIds { expected: labels.len(), found: id });
                }
                let label: Label = b
                    .parse()
                    .map_err(|_| GraphError::BadLabel { line: line_no, token: b.to_string() })?;
                labels.push(label);
                adjacency.push(Vec::new());
            }
            "e" => {
                let parse_end = |tok: &str| -> Result<u64, GraphError> {
                    tok.parse().map_err(|_| GraphError::Parse {
                        line: line_no,
                        message: format!("edge endpoint `{tok}` is not an integer"),
                    })
                };
                let (u, v) = (parse_end(a)?, parse_end(b)?);
                for node in [u, v] {
                    if node >= labels.len() as u64 {
                        return Err(GraphError::DanglingEndpoint { line: line_no, node });
                    }
                }
                let (u, v) = (u as NodeId, v as NodeId);
                if u == v {
                    if strictness == Strictness::Strict {
                        return Err(GraphError::SelfLoop { line: line_no, node: u });
                    }
                    continue;
                }
                let key = (u.min(v), u.max(v));
                if !seen.insert(key) {
                    if strictness == Strictness::Strict {
                        return Err(GraphError::DuplicateEdge { line: line_no, u: key.0, v: key.1 });
                    }
                    continue;
                }
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            }
            other => {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("unknown record type `{other}`"),
                })
            }
        }
    }
    Ok(AttributedGraph::finish(labels, adjacency))
}
