//! Command-line front end: argument handling, report output and the
//! ranking comparison.

pub mod kendall;
pub mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relmine::exact::{exact_alpha_bruteforce, exact_f, ExactError};
use relmine::runtime::ConfigError;
use relmine::{
    derive_seed, estimate_alpha, induced_subgraph, run_job, AlphaConfig, AttributedGraph, FMode, GraphFormat,
    JobConfig, JobError, Model, PatternCode, Strictness,
};

use crate::kendall::kendall_tau_b;
use crate::report::{
    CompareReport, EstimateReport, ExactReport, ExportRecord, Ranking, RankingComparison, Scale, SweepCell,
    SweepReport,
};

/// Failure classes, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(e) | Self::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

fn usage<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Runtime(e.into())
}

#[derive(Parser, Debug)]
#[command(name = "relmine", version, about = "Class-based subgraph pattern statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the per-pattern statistic with the two-layer sampler.
    Estimate(EstimateArgs),
    /// Estimate the proportion of classes per pattern.
    Mcc(EstimateArgs),
    /// Compute the per-pattern statistic by full enumeration.
    Exact(ExactArgs),
    /// Kendall tau between the rankings of two reports.
    Compare(CompareArgs),
    /// Repeat class-weight estimates of one anchor over budgets and tour counts.
    AlphaSweep(SweepArgs),
    /// Write weighted samples as newline-delimited JSON.
    Export(ExportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default, Clone)]
pub struct JobArgs {
    /// Graph file in `.lg` format.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Subgraph size.
    #[arg(long)]
    pub k: Option<usize>,
    /// identity, perc or sh:<d>.
    #[arg(long)]
    pub relation: Option<String>,
    /// unit or hondeg.
    #[arg(long)]
    pub weight: Option<String>,
    /// none or min-internal-degree:<t>.
    #[arg(long)]
    pub filter: Option<String>,
    /// BFS budget per class.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Tours per class.
    #[arg(long)]
    pub tours: Option<usize>,
    /// Upper-walk samples.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; also read from RELMINE_WORKERS.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub max_tour_len: Option<usize>,
    /// Keep truncated tours instead of failing.
    #[arg(long)]
    pub allow_truncation: bool,
    #[arg(long)]
    pub enumeration_cap: Option<usize>,
    /// Drop duplicate edges and self-loops instead of rejecting the graph.
    #[arg(long)]
    pub lenient: bool,
    /// `key = value` file with any of these options.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report fractions instead of percentages.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub job: JobArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Exact report to compute the SSE trajectory against.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Samples between SSE points.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Keep only the first N patterns.
    #[arg(long)]
    pub top: Option<usize>,
    /// Write run timing and accounting here.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ExactArgs {
    #[command(flatten)]
    pub job: JobArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Count every class once.
    #[arg(long)]
    pub mcc: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    pub report_a: PathBuf,
    pub report_b: PathBuf,
    /// Ranking sizes, taken from the top of the first report.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub job: JobArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Anchor node ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub anchor: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub budgets: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub tour_counts: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    #[command(flatten)]
    pub job: JobArgs,
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolves options: defaults, then the config file, then the environment,
/// then explicit flags.
pub fn resolve_job(args: &JobArgs) -> Result<JobConfig, CliError> {
    let mut cfg = JobConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        cfg.apply_kv(&text).map_err(usage)?;
    }
    cfg.apply_env().map_err(usage)?;
    let a = args.clone();
    macro_rules! take {
        ($($field:ident),*) => { $( if let Some(v) = a.$field { cfg.$field = v; } )* };
    }
    take!(k, relation, weight, filter, budget, tours, steps, seed, workers, max_tour_len, enumeration_cap);
    if a.graph.is_some() {
        cfg.graph = a.graph;
    }
    if a.burn_in.is_some() {
        cfg.burn_in = a.burn_in;
    }
    cfg.allow_truncation |= a.allow_truncation;
    Ok(cfg)
}

pub fn load_graph(path: Option<&Path>, lenient: bool) -> Result<AttributedGraph, CliError> {
    let path = path.ok_or_else(|| usage(anyhow!("no graph given (use --graph)")))?;
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(usage)?;
    let strictness = if lenient { Strictness::Lenient } else { Strictness::Strict };
    AttributedGraph::load(BufReader::new(file), GraphFormat::Lg, strictness)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())).map_err(usage),
        None => std::io::stdout().write_all(bytes).context("writing output").map_err(runtime),
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes<R: serde::Serialize>(rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(runtime)?;
    }
    w.into_inner().map_err(|e| runtime(anyhow!("{e}")))
}

#[derive(serde::Serialize)]
struct PatternCsv<'a> {
    rank: usize,
    code: &'a PatternCode,
    pattern: &'a str,
    edges: &'a str,
    f: f64,
}

fn pattern_csv(rows: &[report::PatternRow]) -> Result<Vec<u8>, CliError> {
    csv_bytes(rows.iter().map(|r| PatternCsv { rank: r.rank, code: &r.code, pattern: &r.pattern, edges: &r.edges, f: r.f }))
}

fn scale(raw: bool) -> Scale {
    if raw {
        Scale::Fraction
    } else {
        Scale::Percent
    }
}

fn read_ranking(path: &Path) -> Result<Ranking, CliError> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    serde_json::from_str(&text).with_context(|| format!("parsing report {}", path.display())).map_err(usage)
}

fn cmd_estimate(args: &EstimateArgs, mode: FMode) -> Result<(), CliError> {
    let mut cfg = resolve_job(&args.job)?;
    cfg.mode = mode;
    let truth = args.truth.as_deref().map(read_ranking).transpose()?.map(|r| r.fractions());
    cfg.snapshot_every = args.snapshot_every.or(truth.as_ref().map(|_| (cfg.steps / 100).max(1)));
    cfg.validate().map_err(usage)?;
    let graph = load_graph(cfg.graph.as_deref(), args.job.lenient)?;
    let command = if mode == FMode::Mcc { "mcc" } else { "estimate" };
    let scale = scale(args.output.raw);
    let out = args.output.out.as_deref().or(cfg.out.as_deref());

    let output = match run_job(&cfg, &graph) {
        Ok(o) => o,
        Err(JobError { failure, partial }) => {
            if let Some(p) = partial {
                let mut rep = EstimateReport::new(command, &cfg, &p, scale, args.top);
                rep.error = Some(failure.to_string());
                emit(out, &json_bytes(&rep))?;
            }
            return Err(runtime(failure));
        }
    };
    if let Some(path) = &args.metrics {
        std::fs::write(path, json_bytes(&output.metrics)).with_context(|| format!("writing {}", path.display())).map_err(usage)?;
    }
    let mut rep = EstimateReport::new(command, &cfg, &output.estimate, scale, args.top);
    if let Some(truth) = &truth {
        rep = rep.with_sse(&output.estimate, truth);
    }
    if mode == FMode::Mcc {
        print_table(&rep.patterns, args.top.unwrap_or(10), scale);
    }
    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&rep),
        Format::Csv => pattern_csv(&rep.patterns)?,
    };
    emit(out, &bytes)
}

fn print_table(rows: &[report::PatternRow], n: usize, scale: Scale) {
    let unit = if scale == Scale::Percent { "%" } else { "" };
    eprintln!("{:>4}  {:>10}  {:<24}  edges", "rank", "F", "pattern");
    for r in rows.iter().take(n) {
        eprintln!("{:>4}  {:>9.4}{unit:1}  {:<24}  {}", r.rank, r.f, r.pattern, r.edges);
    }
}

fn cmd_exact(args: &ExactArgs) -> Result<(), CliError> {
    let mut cfg = resolve_job(&args.job)?;
    if args.mcc {
        cfg.mode = FMode::Mcc;
    }
    cfg.validate().map_err(usage)?;
    let graph = load_graph(cfg.graph.as_deref(), args.job.lenient)?;
    let (rel, w, h) = cfg.model_parts().map_err(usage)?;
    let r = exact_f(&graph, cfg.k, &rel, &w, &h, cfg.mode, cfg.enumeration_cap).map_err(runtime)?;
    let rep = ExactReport::new(&cfg, &r, scale(args.output.raw));
    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&rep),
        Format::Csv => pattern_csv(&rep.patterns)?,
    };
    emit(args.output.out.as_deref().or(cfg.out.as_deref()), &bytes)
}

/// Kendall tau over the top `size` patterns of `a`; patterns missing from
/// `b` count as zero there.
pub fn compare_rankings(a: &Ranking, b: &Ranking, sizes: &[usize]) -> anyhow::Result<Vec<RankingComparison>> {
    let fb = b.fractions();
    let mut out = Vec::new();
    for &size in sizes {
        if size > a.patterns.len() {
            bail!("ranking size {size} exceeds the {} patterns of the first report", a.patterns.len());
        }
        let top = &a.patterns[..size];
        let x: Vec<f64> = top.iter().map(|r| r.f / a.scale.factor()).collect();
        let y: Vec<f64> = top.iter().map(|r| fb.get(&r.code).copied().unwrap_or(0.0)).collect();
        let r = kendall_tau_b(&x, &y);
        out.push(RankingComparison { size, tau: r.map(|r| r.tau), p_value: r.map(|r| r.p_value) });
    }
    Ok(out)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let a = read_ranking(&args.report_a)?;
    let b = read_ranking(&args.report_b)?;
    let comparisons = compare_rankings(&a, &b, &args.sizes).map_err(usage)?;
    let bytes = match args.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&CompareReport { command: "compare".into(), comparisons }),
        Format::Csv => csv_bytes(&comparisons)?,
    };
    emit(args.out.as_deref(), &bytes)
}

#[derive(serde::Serialize)]
struct SweepCsv {
    budget: usize,
    tours: usize,
    repeat: usize,
    value: f64,
    exact: bool,
    steps: usize,
    tour_len_mean: f64,
    tour_len_max: usize,
    supernode_size: usize,
    boundary_degree: usize,
    exact_alpha: Option<f64>,
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = resolve_job(&args.job)?;
    cfg.model_parts().map_err(usage)?;
    let graph = load_graph(cfg.graph.as_deref(), args.job.lenient)?;
    let anchor = induced_subgraph(&graph, &args.anchor).context("invalid anchor").map_err(usage)?;
    let (rel, w, h) = cfg.model_parts().map_err(usage)?;
    let model = Model::new(&graph, &rel, &w, &h);
    let exact = match exact_alpha_bruteforce(&graph, &anchor, &rel, &w, &h, cfg.enumeration_cap) {
        Ok(v) => Some(v),
        Err(ExactError::EnumerationCapExceeded { .. }) => None,
        Err(e) => return Err(usage(e)),
    };
    let pool = rayon_pool(cfg.workers)?;
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    let mut task = 0u64;
    for &budget in &args.budgets {
        for &tours in &args.tour_counts {
            let acfg = AlphaConfig { budget, tours, ..cfg.alpha_config() };
            let mut ests = Vec::new();
            for repeat in 0..args.repeats {
                let seed = derive_seed(cfg.seed, task);
                task += 1;
                let est = pool.install(|| estimate_alpha(&model, &anchor, &acfg, seed)).map_err(runtime)?;
                rows.push(SweepCsv {
                    budget,
                    tours,
                    repeat,
                    value: est.value,
                    exact: est.exact,
                    steps: est.steps_total,
                    tour_len_mean: est.tour_len_mean,
                    tour_len_max: est.tour_len_max,
                    supernode_size: est.supernode_size,
                    boundary_degree: est.boundary_degree,
                    exact_alpha: exact,
                });
                ests.push(est);
            }
            cells.push(sweep_cell(budget, tours, &ests));
        }
    }
    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&SweepReport {
            command: "alpha-sweep".into(),
            anchor,
            relation: cfg.relation.clone(),
            weight: cfg.weight.clone(),
            filter: cfg.filter.clone(),
            repeats: args.repeats,
            seed: cfg.seed,
            exact_alpha: exact,
            cells,
        }),
        Format::Csv => csv_bytes(rows)?,
    };
    emit(args.output.out.as_deref().or(cfg.out.as_deref()), &bytes)
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(usage)
}

fn sweep_cell(budget: usize, tours: usize, ests: &[relmine::AlphaEstimate]) -> SweepCell {
    let values: Vec<f64> = ests.iter().map(|e| e.value).collect();
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    SweepCell {
        budget,
        tours,
        mean,
        sd,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_steps: ests.iter().map(|e| e.steps_total as f64).sum::<f64>() / n,
        mean_tour_len: ests.iter().map(|e| e.tour_len_mean).sum::<f64>() / n,
        exact_runs: ests.iter().filter(|e| e.exact).count(),
        values,
    }
}

fn cmd_export(args: &ExportArgs) -> Result<(), CliError> {
    let mut cfg = resolve_job(&args.job)?;
    let out = args.out.as_deref().or(cfg.out.as_deref()).map(Path::to_path_buf);
    if args.n == 0 {
        return emit(out.as_deref(), b"");
    }
    cfg.steps = args.n;
    cfg.keep_samples = true;
    cfg.validate().map_err(usage)?;
    let graph = load_graph(cfg.graph.as_deref(), args.job.lenient)?;
    let output = run_job(&cfg, &graph).map_err(|e| runtime(e.failure))?;
    let mut bytes = Vec::new();
    for s in &output.estimate.samples {
        let rec = ExportRecord {
            index: s.index,
            nodes: s.subgraph.clone(),
            code: s.code.clone(),
            alpha1: s.alpha1,
            alpha2: s.alpha2,
        };
        serde_json::to_writer(&mut bytes, &rec).map_err(runtime)?;
        bytes.push(b'\n');
    }
    emit(out.as_deref(), &bytes)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, FMode::Standard),
        Command::Mcc(a) => cmd_estimate(a, FMode::Mcc),
        Command::Exact(a) => cmd_exact(a),
        Command::Compare(a) => cmd_compare(a),
        Command::AlphaSweep(a) => cmd_sweep(a),
        Command::Export(a) => cmd_export(a),
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        usage(e)
    }
}

/// Fractions per pattern from any report file.
pub fn report_fractions(path: &Path) -> Result<BTreeMap<PatternCode, f64>, CliError> {
    read_ranking(path).map(|r| r.fractions())
}
