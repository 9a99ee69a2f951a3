//! Parallel execution of the two estimation layers.
//!
//! One producer thread runs the upper walk and feeds a bounded queue. Worker
//! threads estimate class weights for the queued samples, running tours on a
//! shared thread pool. A single aggregator folds results back in walk order,
//! so the estimate does not depend on the number of workers or on
//! scheduling.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::RwLock;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, unbounded};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::DEFAULT_MAX_CANON_SIZE;
use crate::exact::{FMode, DEFAULT_ENUMERATION_CAP};
use crate::graph::AttributedGraph;
use crate::relation::{FilterFn, ParseSpecError, RelationSpec, WeightFn};
use crate::sampler::{
    estimate_alpha_pair, run_walk, sample_seed, AlphaConfig, AlphaPair, ClassCache, FAccumulator, FConfig, FEstimate,
    Model, SamplerError, DEFAULT_CERTIFIED_CAP, DEFAULT_MAX_TOUR_LEN,
};
use crate::subgraph::Subgraph;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "RELMINE_WORKERS";

/// Default capacity of the sample queue.
pub const DEFAULT_QUEUE_CAPACITY: usize = 1024;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error(transparent)]
    Spec(#[from] ParseSpecError),
    #[error("{0}")]
    Invalid(String),
}

/// Everything needed to run one estimation job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub graph: Option<PathBuf>,
    pub k: usize,
    pub relation: String,
    pub weight: String,
    pub filter: String,
    pub budget: usize,
    pub tours: usize,
    pub steps: usize,
    pub burn_in: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    pub max_tour_len: usize,
    pub allow_truncation: bool,
    pub enumeration_cap: usize,
    pub certified_cap: usize,
    pub queue_capacity: usize,
    pub mode: FMode,
    pub snapshot_every: Option<usize>,
    pub keep_samples: bool,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            graph: None,
            k: 3,
            relation: "identity".into(),
            weight: "unit".into(),
            filter: "none".into(),
            budget: 1000,
            tours: 100,
            steps: 10_000,
            burn_in: None,
            seed: 0,
            workers: 1,
            max_tour_len: DEFAULT_MAX_TOUR_LEN,
            allow_truncation: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            certified_cap: DEFAULT_CERTIFIED_CAP,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            mode: FMode::Standard,
            snapshot_every: None,
            keep_samples: false,
            out: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: value.into() })
}

impl JobConfig {
    /// Sets one option by its command-line name (`max-tour-len`, ...).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        match key.replace('_', "-").as_str() {
            "graph" => self.graph = Some(value.into()),
            "k" => self.k = parse_value(key, value)?,
            "relation" => self.relation = value.into(),
            "weight" => self.weight = value.into(),
            "filter" => self.filter = value.into(),
            "budget" => self.budget = parse_value(key, value)?,
            "tours" => self.tours = parse_value(key, value)?,
            "steps" => self.steps = parse_value(key, value)?,
            "burn-in" => self.burn_in = Some(parse_value(key, value)?),
            "seed" => self.seed = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            "max-tour-len" => self.max_tour_len = parse_value(key, value)?,
            "allow-truncation" => self.allow_truncation = parse_value(key, value)?,
            "enumeration-cap" => self.enumeration_cap = parse_value(key, value)?,
            "certified-cap" => self.certified_cap = parse_value(key, value)?,
            "queue-capacity" => self.queue_capacity = parse_value(key, value)?,
            "mode" => {
                self.mode = match value {
                    "standard" => FMode::Standard,
                    "mcc" => FMode::Mcc,
                    _ => return Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
                }
            }
            "snapshot-every" => self.snapshot_every = Some(parse_value(key, value)?),
            "keep-samples" => self.keep_samples = parse_value(key, value)?,
            "out" => self.out = Some(value.into()),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment line.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies the worker override from [`WORKERS_ENV`], if set.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            self.workers = parse_value(WORKERS_ENV, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.k < 2 || self.k > DEFAULT_MAX_CANON_SIZE {
            return fail(&format!("k must be in [2, {DEFAULT_MAX_CANON_SIZE}]"));
        }
        if self.budget == 0 || self.tours == 0 || self.steps == 0 {
            return fail("budget, tours and steps must be at least 1");
        }
        if self.workers == 0 || self.queue_capacity == 0 {
            return fail("workers and queue capacity must be at least 1");
        }
        self.model_parts().map(|_| ())
    }

    pub fn model_parts(&self) -> Result<(RelationSpec, WeightFn, FilterFn), ConfigError> {
        Ok((self.relation.parse()?, self.weight.parse()?, self.filter.parse()?))
    }

    pub fn alpha_config(&self) -> AlphaConfig {
        AlphaConfig {
            budget: self.budget,
            tours: self.tours,
            max_tour_len: self.max_tour_len,
            allow_truncation: self.allow_truncation,
            singleton_shortcut: true,
        }
    }

    pub fn f_config(&self) -> FConfig {
        FConfig {
            k: self.k,
            samples: self.steps,
            burn_in: self.burn_in,
            alpha: self.alpha_config(),
            mode: self.mode,
            snapshot_every: self.snapshot_every,
            keep_samples: self.keep_samples,
            certified_cap: self.certified_cap,
            start: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkerMetrics {
    pub tasks: usize,
    /// Tasks for which a class estimate was computed.
    pub computed: usize,
    pub busy_secs: f64,
}

/// Timing and accounting for one job. Not part of the estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub wall_secs: f64,
    pub workers: usize,
    pub upper_steps: usize,
    pub bfs_steps: usize,
    pub tour_steps: usize,
    pub total_steps: usize,
    pub classes_estimated: usize,
    pub per_worker: Vec<WorkerMetrics>,
    pub utilization: f64,
    pub truncated_tours: usize,
    pub uncertified_visits: usize,
    pub certified_overflow: usize,
}

impl RunMetrics {
    /// Wall-time speedup relative to `baseline`.
    pub fn speedup_over(&self, baseline: &RunMetrics) -> f64 {
        baseline.wall_secs / self.wall_secs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobOutput {
    pub estimate: FEstimate,
    pub metrics: RunMetrics,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum JobFailure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// A failed job with whatever was aggregated before the failure.
#[derive(Error, Debug, Clone, PartialEq)]
#[error("job failed after {} samples: {failure}", .partial.as_ref().map_or(0, |p| p.samples_used))]
pub struct JobError {
    pub failure: JobFailure,
    pub partial: Option<FEstimate>,
}

impl<E: Into<JobFailure>> From<E> for JobError {
    fn from(e: E) -> Self {
        Self { failure: e.into(), partial: None }
    }
}

enum Message {
    Done { index: usize, subgraph: Subgraph, pair: Option<Result<AlphaPair, SamplerError>> },
    WalkFailed { index: usize, error: SamplerError },
}

impl Message {
    fn index(&self) -> usize {
        match self {
            Self::Done { index, .. } | Self::WalkFailed { index, .. } => *index,
        }
    }
}

/// Runs the estimator on `graph` with `cfg.workers` workers.
pub fn run_job(cfg: &JobConfig, graph: &AttributedGraph) -> Result<JobOutput, JobError> {
    cfg.validate()?;
    let (relation, weight, filter) = cfg.model_parts()?;
    let model = Model::new(graph, &relation, &weight, &filter);
    let fcfg = cfg.f_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| JobFailure::Pool(e.to_string()))?;
    let walk = run_walk(&model, &fcfg, cfg.seed)?;

    let started = Instant::now();
    let (task_tx, task_rx) = bounded::<(usize, Subgraph)>(cfg.queue_capacity);
    let (result_tx, result_rx) = unbounded::<Message>();
    let stop = AtomicBool::new(false);
    let view = RwLock::new(ClassCache::new(cfg.certified_cap));

    let mut acc = FAccumulator::new(&fcfg);
    let mut failure: Option<SamplerError> = None;
    let mut per_worker = vec![WorkerMetrics::default(); cfg.workers];

    let upper_steps = std::thread::scope(|scope| {
        let producer = {
            let result_tx = result_tx.clone();
            let (stop, mut walk) = (&stop, walk);
            scope.spawn(move || {
                for index in 0..fcfg.samples {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    match walk.next().expect("walk yields until it fails") {
                        Ok(s) => {
                            if task_tx.send((index, s)).is_err() {
                                break;
                            }
                        }
                        Err(error) => {
                            let _ = result_tx.send(Message::WalkFailed { index, error });
                            break;
                        }
                    }
                }
                walk.steps()
            })
        };

        let mut consumers = Vec::new();
        for _ in 0..cfg.workers {
            let (task_rx, result_tx) = (task_rx.clone(), result_tx.clone());
            let (stop, view, pool, model, fcfg) = (&stop, &view, &pool, &model, &fcfg);
            consumers.push(scope.spawn(move || {
                let mut metrics = WorkerMetrics::default();
                for (index, subgraph) in task_rx.iter() {
                    if stop.load(Ordering::Relaxed) {
                        continue;
                    }
                    let t0 = Instant::now();
                    let known = view.read().expect("cache lock").lookup(model, &subgraph).is_some();
                    let pair = (!known).then(|| {
                        pool.install(|| estimate_alpha_pair(model, &subgraph, &fcfg.alpha, sample_seed(cfg.seed, index)))
                    });
                    metrics.tasks += 1;
                    metrics.computed += usize::from(pair.is_some());
                    metrics.busy_secs += t0.elapsed().as_secs_f64();
                    // After a failure the aggregator is gone; keep draining so
                    // the producer is never left blocked on a full queue.
                    let _ = result_tx.send(Message::Done { index, subgraph, pair });
                }
                metrics
            }));
        }
        drop(task_rx);
        drop(result_tx);

        let mut buffer: BTreeMap<usize, Message> = BTreeMap::new();
        let mut next = 0;
        'recv: for msg in result_rx.iter() {
            buffer.insert(msg.index(), msg);
            while let Some(msg) = buffer.remove(&next) {
                match msg {
                    Message::Done { index, subgraph, pair, .. } => {
                        let before = acc.cache().len();
                        let mut members = Vec::new();
                        let pushed = acc.push(&model, &subgraph, || {
                            let pair = pair.unwrap_or_else(|| {
                                estimate_alpha_pair(&model, &subgraph, &fcfg.alpha, sample_seed(cfg.seed, index))
                            })?;
                            members = pair.members.clone();
                            Ok(pair)
                        });
                        if let Err(e) = pushed {
                            failure = Some(e);
                            break 'recv;
                        }
                        if acc.cache().len() > before {
                            view.write().expect("cache lock").insert(&model, &subgraph, &members);
                        }
                    }
                    Message::WalkFailed { error, .. } => {
                        failure = Some(error);
                        break 'recv;
                    }
                }
                next += 1;
            }
            if next == fcfg.samples {
                break;
            }
        }
        stop.store(true, Ordering::Relaxed);
        drop(result_rx);
        for (w, c) in consumers.into_iter().enumerate() {
            per_worker[w] = c.join().expect("worker panicked");
        }
        producer.join().expect("producer panicked")
    });

    let wall = started.elapsed();
    let estimate = acc.finish(upper_steps);
    if let Some(error) = failure {
        return Err(JobError { failure: error.into(), partial: Some(estimate) });
    }
    let metrics = metrics_for(&estimate, per_worker, wall, cfg.workers);
    Ok(JobOutput { estimate, metrics })
}

fn metrics_for(est: &FEstimate, per_worker: Vec<WorkerMetrics>, wall: Duration, workers: usize) -> RunMetrics {
    let busy: f64 = per_worker.iter().map(|w| w.busy_secs).sum();
    let wall_secs = wall.as_secs_f64();
    RunMetrics {
        wall_secs,
        workers,
        upper_steps: est.steps.upper,
        bfs_steps: est.steps.bfs,
        tour_steps: est.steps.tours,
        total_steps: est.steps.total(),
        classes_estimated: est.classes.len(),
        utilization: if wall_secs > 0.0 { busy / (wall_secs * workers as f64) } else { 0.0 },
        per_worker,
        truncated_tours: est.truncated_tours,
        uncertified_visits: est.uncertified_visits,
        certified_overflow: est.certified_overflow,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::sampler::estimate_f;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph() -> AttributedGraph {
        generators::connected_gnp(14, 0.25, 2, &mut ChaCha8Rng::seed_from_u64(9))
    }

    fn cfg(relation: &str) -> JobConfig {
        JobConfig { relation: relation.into(), budget: 6, tours: 8, steps: 400, seed: 5, ..JobConfig::default() }
    }

    #[test]
    fn kv_config() {
        let mut c = JobConfig::default();
        c.apply_kv("# job\nk = 4\nrelation=sh:3\nmax-tour-len = 99\nburn_in=7\nmode = mcc\n").unwrap();
        assert_eq!((c.k, c.relation.as_str(), c.max_tour_len, c.burn_in, c.mode), (4, "sh:3", 99, Some(7), FMode::Mcc));
        assert_eq!(c.apply_kv("bogus = 1"), Err(ConfigError::UnknownKey("bogus".into())));
        assert_eq!(c.apply_kv("k 3"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(c.apply_kv("k = three"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn validation() {
        assert!(JobConfig { k: 1, ..JobConfig::default() }.validate().is_err());
        assert!(JobConfig { tours: 0, ..JobConfig::default() }.validate().is_err());
        assert!(JobConfig { relation: "nope".into(), ..JobConfig::default() }.validate().is_err());
        assert!(JobConfig::default().validate().is_ok());
    }

    #[test]
    fn matches_sequential_for_any_worker_count() {
        let g = graph();
        for relation in ["identity", "perc", "sh:4"] {
            let base = cfg(relation);
            let (rel, w, h) = base.model_parts().unwrap();
            let seq = estimate_f(&Model::new(&g, &rel, &w, &h), &base.f_config(), base.seed).unwrap();
            for workers in [1, 2, 4] {
                for queue_capacity in [1, 1024] {
                    let c = JobConfig { workers, queue_capacity, ..base.clone() };
                    let out = run_job(&c, &g).unwrap();
                    assert_eq!(out.estimate, seq, "{relation} workers={workers}");
                }
            }
        }
    }

    #[test]
    fn steps_reconcile() {
        let g = graph();
        let out = run_job(&JobConfig { workers: 2, ..cfg("sh:4") }, &g).unwrap();
        let per_class: usize = out.estimate.classes.iter().map(|c| c.alpha1.steps_total).sum();
        assert_eq!(out.metrics.total_steps, per_class + out.metrics.upper_steps);
        assert_eq!(out.metrics.per_worker.iter().map(|w| w.tasks).sum::<usize>(), 400);
    }

    #[test]
    fn single_sample() {
        let g = graph();
        let out = run_job(&JobConfig { steps: 1, ..cfg("perc") }, &g).unwrap();
        assert_eq!(out.estimate.classes.len(), 1);
        assert_eq!(out.estimate.patterns.values().copied().collect::<Vec<_>>(), vec![1.0]);
    }

    #[test]
    fn failure_keeps_partial_estimate() {
        let g = graph();
        let c = JobConfig { max_tour_len: 3, workers: 2, ..cfg("sh:4") };
        let err = run_job(&c, &g).unwrap_err();
        assert!(matches!(err.failure, JobFailure::Sampler(SamplerError::TourTruncated { .. })));
        assert!(err.partial.is_some());
    }
}
