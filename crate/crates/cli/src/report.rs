//! Serializable reports written by the commands.

use std::collections::BTreeMap;

use relmine::exact::ExactFReport;
use relmine::sampler::{ClassRecord, FEstimate, StepCounts};
use relmine::{FMode, JobConfig, PatternCode, Subgraph};
use serde::{Deserialize, Serialize};

/// Scale applied to every reported pattern statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Percent,
    Fraction,
}

impl Scale {
    pub fn factor(self) -> f64 {
        match self {
            Self::Percent => 100.0,
            Self::Fraction => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub rank: usize,
    pub code: PatternCode,
    /// `k|labels|adjacency` rendering.
    pub pattern: String,
    /// Edges over canonical positions.
    pub edges: String,
    pub f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgraphs: Option<usize>,
}

impl PatternRow {
    fn new(code: &PatternCode, f: f64) -> Self {
        Self {
            rank: 0,
            code: code.clone(),
            pattern: code.compact(),
            edges: code.edge_list(),
            f,
            classes: None,
            subgraphs: None,
        }
    }
}

/// Rows sorted by decreasing `f`, ties by code, with ranks assigned.
fn ranked(mut rows: Vec<PatternRow>) -> Vec<PatternRow> {
    rows.sort_by(|a, b| b.f.total_cmp(&a.f).then_with(|| a.code.cmp(&b.code)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    rows
}

/// Job parameters echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub k: usize,
    pub relation: String,
    pub weight: String,
    pub filter: String,
    pub budget: usize,
    pub tours: usize,
    pub steps: usize,
    pub burn_in: Option<usize>,
    pub seed: u64,
    pub max_tour_len: usize,
    pub mode: FMode,
}

impl From<&JobConfig> for RunSummary {
    fn from(c: &JobConfig) -> Self {
        Self {
            k: c.k,
            relation: c.relation.clone(),
            weight: c.weight.clone(),
            filter: c.filter.clone(),
            budget: c.budget,
            tours: c.tours,
            steps: c.steps,
            burn_in: c.burn_in,
            seed: c.seed,
            max_tour_len: c.max_tour_len,
            mode: c.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub leader: Subgraph,
    pub code: PatternCode,
    pub first_sample: usize,
    pub hits: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub exact: bool,
    pub tours: usize,
    pub tour_len_mean: f64,
    pub tour_len_max: usize,
    pub bfs_visited: usize,
    pub supernode_size: usize,
    pub boundary_degree: usize,
    pub steps: usize,
    pub alpha1_stderr: f64,
    pub alpha2_stderr: f64,
}

impl From<&ClassRecord> for ClassRow {
    fn from(c: &ClassRecord) -> Self {
        Self {
            leader: c.leader.clone(),
            code: c.code.clone(),
            first_sample: c.first_sample,
            hits: c.hits,
            alpha1: c.alpha1.value,
            alpha2: c.alpha2.value,
            exact: c.alpha1.exact,
            tours: c.alpha1.tours_used,
            tour_len_mean: c.alpha1.tour_len_mean,
            tour_len_max: c.alpha1.tour_len_max,
            bfs_visited: c.alpha1.bfs_visited,
            supernode_size: c.alpha1.supernode_size,
            boundary_degree: c.alpha1.boundary_degree,
            steps: c.alpha1.steps_total,
            alpha1_stderr: c.alpha1.tour_stderr,
            alpha2_stderr: c.alpha2.tour_stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsePoint {
    pub samples: usize,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub upper: usize,
    pub bfs: usize,
    pub tours: usize,
    pub total: usize,
}

impl From<StepCounts> for StepReport {
    fn from(s: StepCounts) -> Self {
        Self { upper: s.upper, bfs: s.bfs, tours: s.tours, total: s.total() }
    }
}

/// Output of `estimate` and `mcc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub command: String,
    pub scale: Scale,
    pub config: RunSummary,
    pub samples: usize,
    pub lambda_hat: f64,
    pub patterns: Vec<PatternRow>,
    pub classes: Vec<ClassRow>,
    pub steps: StepReport,
    pub truncated_tours: usize,
    pub uncertified_visits: usize,
    pub certified_overflow: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sse: Option<Vec<SsePoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sum of squared differences over the union of patterns.
pub fn sse(a: &BTreeMap<PatternCode, f64>, b: &BTreeMap<PatternCode, f64>) -> f64 {
    let mut total = 0.0;
    for (p, x) in a {
        total += (x - b.get(p).copied().unwrap_or(0.0)).powi(2);
    }
    for (p, y) in b {
        if !a.contains_key(p) {
            total += y * y;
        }
    }
    total
}

impl EstimateReport {
    pub fn new(command: &str, cfg: &JobConfig, est: &FEstimate, scale: Scale, top: Option<usize>) -> Self {
        let factor = scale.factor();
        let mut patterns = ranked(est.patterns.iter().map(|(p, f)| PatternRow::new(p, f * factor)).collect());
        if let Some(n) = top {
            patterns.truncate(n);
        }
        Self {
            command: command.into(),
            scale,
            config: cfg.into(),
            samples: est.samples_used,
            lambda_hat: est.lambda_hat,
            patterns,
            classes: est.classes.iter().map(ClassRow::from).collect(),
            steps: est.steps.into(),
            truncated_tours: est.truncated_tours,
            uncertified_visits: est.uncertified_visits,
            certified_overflow: est.certified_overflow,
            sse: None,
            error: None,
        }
    }

    /// Adds the SSE against `truth` (fractions) at every snapshot, on the
    /// report's scale.
    pub fn with_sse(mut self, est: &FEstimate, truth: &BTreeMap<PatternCode, f64>) -> Self {
        let factor = self.scale.factor();
        let scaled = |m: &BTreeMap<PatternCode, f64>| -> BTreeMap<PatternCode, f64> {
            m.iter().map(|(p, v)| (p.clone(), v * factor)).collect()
        };
        let truth = scaled(truth);
        let mut points: Vec<SsePoint> = est
            .snapshots
            .iter()
            .map(|s| SsePoint { samples: s.samples, sse: sse(&scaled(&s.patterns), &truth) })
            .collect();
        if points.last().map(|p| p.samples) != Some(est.samples_used) {
            points.push(SsePoint { samples: est.samples_used, sse: sse(&scaled(&est.patterns), &truth) });
        }
        self.sse = Some(points);
        self
    }
}

/// Output of `exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub command: String,
    pub scale: Scale,
    pub k: usize,
    pub relation: String,
    pub weight: String,
    pub filter: String,
    pub mode: FMode,
    pub lambda: f64,
    pub class_count: usize,
    pub subgraph_count: usize,
    pub patterns: Vec<PatternRow>,
}

impl ExactReport {
    pub fn new(cfg: &JobConfig, r: &ExactFReport, scale: Scale) -> Self {
        let factor = scale.factor();
        let rows = r
            .patterns
            .iter()
            .map(|(p, t)| PatternRow {
                classes: Some(t.classes),
                subgraphs: Some(t.subgraphs),
                ..PatternRow::new(p, t.f * factor)
            })
            .collect();
        Self {
            command: "exact".into(),
            scale,
            k: cfg.k,
            relation: cfg.relation.clone(),
            weight: cfg.weight.clone(),
            filter: cfg.filter.clone(),
            mode: cfg.mode,
            lambda: r.lambda,
            class_count: r.class_count,
            subgraph_count: r.subgraph_count,
            patterns: ranked(rows),
        }
    }
}

/// The part of any report needed to compare rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub scale: Scale,
    pub patterns: Vec<PatternRow>,
}

impl Ranking {
    /// Pattern statistics as fractions.
    pub fn fractions(&self) -> BTreeMap<PatternCode, f64> {
        let factor = self.scale.factor();
        self.patterns.iter().map(|r| (r.code.clone(), r.f / factor)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingComparison {
    pub size: usize,
    pub tau: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub command: String,
    pub comparisons: Vec<RankingComparison>,
}

/// One `(B, q)` cell of an alpha sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub budget: usize,
    pub tours: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub mean_steps: f64,
    pub mean_tour_len: f64,
    pub exact_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub command: String,
    pub anchor: Subgraph,
    pub relation: String,
    pub weight: String,
    pub filter: String,
    pub repeats: usize,
    pub seed: u64,
    pub exact_alpha: Option<f64>,
    pub cells: Vec<SweepCell>,
}

/// One exported sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub index: usize,
    pub nodes: Subgraph,
    pub code: PatternCode,
    pub alpha1: f64,
    pub alpha2: f64,
}
