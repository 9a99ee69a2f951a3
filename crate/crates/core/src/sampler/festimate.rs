use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::alpha::{estimate_alpha_pair, AlphaConfig, AlphaEstimate, AlphaPair};
use super::upper::{default_burn_in, UpperWalk};
use super::{Model, SamplerError};
use crate::canon::{code_unchecked, PatternCode};
use crate::exact::FMode;
use crate::graph::NodeId;
use crate::relation::{hubs, related_local, RelationSpec};
use crate::rng::{derive_rng, derive_seed};
use crate::subgraph::Subgraph;

/// Default limit on subgraphs remembered by the class cache.
pub const DEFAULT_CERTIFIED_CAP: usize = 1_000_000;

/// Parameters of the pattern-statistic estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FConfig {
    pub k: usize,
    /// Upper-walk samples `t`.
    pub samples: usize,
    /// `None` selects [`default_burn_in`].
    pub burn_in: Option<usize>,
    pub alpha: AlphaConfig,
    pub mode: FMode,
    /// Record the running estimate every this many samples.
    pub snapshot_every: Option<usize>,
    /// Keep one record per sample.
    pub keep_samples: bool,
    pub certified_cap: usize,
    pub start: Option<Subgraph>,
}

impl Default for FConfig {
    fn default() -> Self {
        Self {
            k: 3,
            samples: 1000,
            burn_in: None,
            alpha: AlphaConfig::default(),
            mode: FMode::Standard,
            snapshot_every: None,
            keep_samples: false,
            certified_cap: DEFAULT_CERTIFIED_CAP,
            start: None,
        }
    }
}

/// An estimated class, keyed by the first sample that reached it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub leader: Subgraph,
    pub code: PatternCode,
    pub first_sample: usize,
    pub hits: usize,
    pub alpha1: AlphaEstimate,
    pub alpha2: AlphaEstimate,
}

/// One upper-walk sample with the weights it received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub subgraph: Subgraph,
    pub code: PatternCode,
    pub class: usize,
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub samples: usize,
    pub patterns: BTreeMap<PatternCode, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepCounts {
    pub upper: usize,
    pub bfs: usize,
    pub tours: usize,
}

impl StepCounts {
    pub fn total(&self) -> usize {
        self.upper + self.bfs + self.tours
    }
}

/// Estimated pattern statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FEstimate {
    pub patterns: BTreeMap<PatternCode, f64>,
    pub lambda_hat: f64,
    pub samples_used: usize,
    pub mode: FMode,
    pub classes: Vec<ClassRecord>,
    pub snapshots: Vec<Snapshot>,
    pub samples: Vec<SampleRecord>,
    pub steps: StepCounts,
    pub truncated_tours: usize,
    pub uncertified_visits: usize,
    pub certified_overflow: usize,
}

/// Maps subgraphs to classes estimated earlier in the run.
///
/// Identity and shared-hubs classes are recognized exactly. Percolation
/// classes are recognized through the members found by their BFS, so a
/// class can appear more than once if it is reached outside those members.
#[derive(Debug, Clone)]
pub struct ClassCache {
    by_member: HashMap<Subgraph, usize>,
    by_hubs: HashMap<(PatternCode, Vec<NodeId>), usize>,
    leaders: Vec<Subgraph>,
    cap: usize,
    overflow: usize,
}

impl ClassCache {
    pub fn new(cap: usize) -> Self {
        Self { by_member: HashMap::new(), by_hubs: HashMap::new(), leaders: Vec::new(), cap, overflow: 0 }
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    /// Members that did not fit under the cap.
    pub fn overflow(&self) -> usize {
        self.overflow
    }

    pub fn lookup(&self, model: &Model<'_>, s: &Subgraph) -> Option<usize> {
        match model.relation {
            RelationSpec::Identity | RelationSpec::Perc => self.by_member.get(s).copied(),
            RelationSpec::SharedHubs(d) => {
                self.by_hubs.get(&(code_unchecked(model.graph, s), hubs(model.graph, s, *d))).copied()
            }
            RelationSpec::UserDefined { .. } => {
                self.leaders.iter().position(|l| related_local(model.relation, model.graph, l, s))
            }
        }
    }

    /// Registers a new class led by `leader`; returns its index.
    pub fn insert(&mut self, model: &Model<'_>, leader: &Subgraph, members: &[Subgraph]) -> usize {
        let idx = self.leaders.len();
        self.leaders.push(leader.clone());
        match model.relation {
            RelationSpec::Identity => {
                self.by_member.insert(leader.clone(), idx);
            }
            RelationSpec::Perc => {
                for m in members {
                    if self.by_member.len() >= self.cap {
                        self.overflow += 1;
                        continue;
                    }
                    self.by_member.entry(m.clone()).or_insert(idx);
                }
            }
            RelationSpec::SharedHubs(d) => {
                let key = (code_unchecked(model.graph, leader), hubs(model.graph, leader, *d));
                self.by_hubs.entry(key).or_insert(idx);
            }
            RelationSpec::UserDefined { .. } => {}
        }
        idx
    }
}

/// Folds samples, in walk order, into the running estimate.
pub struct FAccumulator {
    mode: FMode,
    keep_samples: bool,
    snapshot_every: Option<usize>,
    cache: ClassCache,
    sums: BTreeMap<PatternCode, f64>,
    lambda: f64,
    samples: usize,
    classes: Vec<ClassRecord>,
    snapshots: Vec<Snapshot>,
    records: Vec<SampleRecord>,
    steps: StepCounts,
}

impl FAccumulator {
    pub fn new(cfg: &FConfig) -> Self {
        Self {
            mode: cfg.mode,
            keep_samples: cfg.keep_samples,
            snapshot_every: cfg.snapshot_every.filter(|&n| n > 0),
            cache: ClassCache::new(cfg.certified_cap),
            sums: BTreeMap::new(),
            lambda: 0.0,
            samples: 0,
            classes: Vec::new(),
            snapshots: Vec::new(),
            records: Vec::new(),
            steps: StepCounts::default(),
        }
    }

    pub fn cache(&self) -> &ClassCache {
        &self.cache
    }

    /// Adds the next sample. `compute` is only called when the sample's class
    /// has not been estimated yet.
    pub fn push<F>(&mut self, model: &Model<'_>, s: &Subgraph, compute: F) -> Result<(), SamplerError>
    where
        F: FnOnce() -> Result<AlphaPair, SamplerError>,
    {
        let index = self.samples;
        let class = match self.cache.lookup(model, s) {
            Some(c) => {
                self.classes[c].hits += 1;
                c
            }
            None => {
                let pair = compute()?;
                if pair.second.value <= 0.0 {
                    return Err(SamplerError::ZeroDegreeClass(s.clone()));
                }
                self.steps.bfs += pair.first.bfs_visited;
                self.steps.tours += pair.first.steps_total - pair.first.bfs_visited;
                let c = self.cache.insert(model, s, &pair.members);
                self.classes.push(ClassRecord {
                    leader: s.clone(),
                    code: code_unchecked(model.graph, s),
                    first_sample: index,
                    hits: 1,
                    alpha1: pair.first,
                    alpha2: pair.second,
                });
                c
            }
        };
        let record = &self.classes[class];
        let alpha1 = match self.mode {
            FMode::Standard => record.alpha1.value,
            FMode::Mcc => 1.0,
        };
        let alpha2 = record.alpha2.value;
        let ratio = alpha1 / alpha2;
        let code = code_unchecked(model.graph, s);
        *self.sums.entry(code.clone()).or_insert(0.0) += ratio;
        self.lambda += ratio;
        self.samples += 1;
        if self.keep_samples {
            self.records.push(SampleRecord { index, subgraph: s.clone(), code, class, alpha1, alpha2 });
        }
        if let Some(every) = self.snapshot_every {
            if self.samples % every == 0 {
                self.snapshots.push(Snapshot { samples: self.samples, patterns: self.normalized() });
            }
        }
        Ok(())
    }

    fn normalized(&self) -> BTreeMap<PatternCode, f64> {
        self.sums.iter().map(|(p, v)| (p.clone(), v / self.lambda)).collect()
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn finish(self, upper_steps: usize) -> FEstimate {
        let patterns = if self.samples > 0 { self.normalized() } else { BTreeMap::new() };
        FEstimate {
            patterns,
            lambda_hat: self.lambda,
            samples_used: self.samples,
            mode: self.mode,
            truncated_tours: self.classes.iter().map(|c| c.alpha1.truncated_tours).sum(),
            uncertified_visits: self.classes.iter().map(|c| c.alpha1.uncertified_visits).sum(),
            certified_overflow: self.cache.overflow(),
            classes: self.classes,
            snapshots: self.snapshots,
            samples: self.records,
            steps: StepCounts { upper: upper_steps, ..self.steps },
        }
    }
}

/// Seed of the lower-layer estimate for upper-walk sample `index`.
pub fn sample_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64 + 1)
}

/// The upper walk of a run: stream 0 of the master seed.
pub fn run_walk<'g>(model: &Model<'g>, cfg: &FConfig, master: u64) -> Result<UpperWalk<'g>, SamplerError> {
    let burn_in = cfg.burn_in.unwrap_or_else(|| default_burn_in(cfg.k, model.graph.node_count()));
    UpperWalk::new(model.graph, cfg.k, model.filter.clone(), burn_in, cfg.start.clone(), derive_rng(master, 0))
}

/// Sequential pattern-statistic estimate.
///
/// Returns the same estimate as the parallel runtime for the same seed.
pub fn estimate_f(model: &Model<'_>, cfg: &FConfig, master: u64) -> Result<FEstimate, SamplerError> {
    if cfg.samples == 0 {
        return Err(SamplerError::NoSamples);
    }
    let mut walk = run_walk(model, cfg, master)?;
    let mut acc = FAccumulator::new(cfg);
    for index in 0..cfg.samples {
        let s = walk.next().expect("walk yields until it fails")?;
        acc.push(model, &s, || estimate_alpha_pair(model, &s, &cfg.alpha, sample_seed(master, index)))?;
    }
    Ok(acc.finish(walk.steps()))
}
