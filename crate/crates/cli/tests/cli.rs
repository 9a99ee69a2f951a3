use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relmine::{
    exact_alpha_bruteforce, exact_f, generators, induced_subgraph, AttributedGraph, FMode, FilterFn, GraphFormat,
    PatternCode, RelationSpec, Strictness, WeightFn, DEFAULT_ENUMERATION_CAP,
};
use relmine_cli::report::{EstimateReport, ExportRecord, Ranking, SweepReport};
use tempfile::TempDir;

fn relmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relmine")).args(args).env_remove("RELMINE_WORKERS").output().unwrap()
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = relmine(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn write_graph(dir: &TempDir, name: &str, g: &AttributedGraph) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, g.to_lg()).unwrap();
    path
}

fn small_graph() -> AttributedGraph {
    generators::connected_gnp(11, 0.35, 2, &mut ChaCha8Rng::seed_from_u64(4))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_graph_is_a_usage_error() {
    let out = relmine(&["estimate", "--graph", "/nonexistent/g.lg", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/g.lg"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(relmine(&["estimate", "--k", "three"]).status.code(), Some(2));
    assert_eq!(relmine(&["frobnicate"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    assert_eq!(relmine(&["estimate", "--graph", s(&g), "--relation", "nope"]).status.code(), Some(2));
    assert_eq!(relmine(&["estimate", "--graph", s(&g), "--k", "0"]).status.code(), Some(2));
}

#[test]
fn single_step_gives_one_pattern() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let rep: EstimateReport = serde_json::from_slice(&ok(&["estimate", "--graph", s(&g), "--k", "3", "--steps", "1"])).unwrap();
    assert_eq!(rep.patterns.len(), 1);
    assert_eq!(rep.patterns[0].f, 100.0);
    let raw: EstimateReport =
        serde_json::from_slice(&ok(&["estimate", "--graph", s(&g), "--k", "3", "--steps", "1", "--raw"])).unwrap();
    assert_eq!(raw.patterns[0].f, 1.0);
}

#[test]
fn mcc_on_c5_perc_is_one_class() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "c5.lg", &generators::cycle(5));
    let rep: EstimateReport =
        serde_json::from_slice(&ok(&["mcc", "--graph", s(&g), "--k", "3", "--relation", "perc", "--steps", "50", "--raw"]))
            .unwrap();
    assert_eq!(rep.patterns.len(), 1);
    assert_eq!(rep.patterns[0].f, 1.0);
    assert_eq!(rep.classes.len(), 1);
}

#[test]
fn identity_mcc_tracks_exact_proportions() {
    let dir = TempDir::new().unwrap();
    let graph = small_graph();
    let g = write_graph(&dir, "g.lg", &graph);
    let rep: EstimateReport = serde_json::from_slice(&ok(&[
        "mcc", "--graph", s(&g), "--k", "3", "--relation", "identity", "--steps", "40000", "--raw", "--seed", "3",
    ]))
    .unwrap();
    let exact =
        exact_f(&graph, 3, &RelationSpec::Identity, &WeightFn::Unit, &FilterFn::None, FMode::Standard, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .f_map();
    let est: BTreeMap<PatternCode, f64> = rep.patterns.iter().map(|r| (r.code.clone(), r.f)).collect();
    assert!(relmine_cli::report::sse(&est, &exact) < 1e-3, "{est:?} vs {exact:?}");
}

#[test]
fn exact_then_compare_with_itself() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let ex = dir.path().join("exact.json");
    ok(&["exact", "--graph", s(&g), "--k", "3", "--relation", "sh:4", "--out", s(&ex)]);
    let ranking: Ranking = serde_json::from_slice(&std::fs::read(&ex).unwrap()).unwrap();
    let n = ranking.patterns.len();
    assert!(n >= 3);
    let out: serde_json::Value =
        serde_json::from_slice(&ok(&["compare", s(&ex), s(&ex), "--sizes", &format!("2,{n}")])).unwrap();
    for c in out["comparisons"].as_array().unwrap() {
        assert_eq!(c["tau"].as_f64(), Some(1.0));
    }
    let too_big = relmine(&["compare", s(&ex), s(&ex), "--sizes", &(n + 1).to_string()]);
    assert_eq!(too_big.status.code(), Some(2));
}

#[test]
fn compare_reversed_rankings() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let ex = dir.path().join("exact.json");
    ok(&["exact", "--graph", s(&g), "--k", "3", "--out", s(&ex), "--raw"]);
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&ex).unwrap()).unwrap();
    let rows = v["patterns"].as_array_mut().unwrap();
    let n = rows.len();
    for (i, r) in rows.iter_mut().enumerate() {
        r["f"] = serde_json::json!(i as f64 + 1.0);
    }
    let asc = v.clone();
    for (i, r) in v["patterns"].as_array_mut().unwrap().iter_mut().enumerate() {
        r["f"] = serde_json::json!((n - i) as f64);
    }
    std::fs::write(&ex, serde_json::to_vec(&v).unwrap()).unwrap();
    let v = asc;
    let rev = dir.path().join("rev.json");
    std::fs::write(&rev, serde_json::to_vec(&v).unwrap()).unwrap();
    let out: serde_json::Value = serde_json::from_slice(&ok(&["compare", s(&ex), s(&rev), "--sizes", &n.to_string()])).unwrap();
    let tau = out["comparisons"][0]["tau"].as_f64().unwrap();
    assert!((tau + 1.0).abs() < 1e-12, "{tau}");
}

#[test]
fn reports_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let bytes = ok(&["estimate", "--graph", s(&g), "--k", "3", "--relation", "sh:4", "--steps", "100", "--budget", "5"]);
    let rep: EstimateReport = serde_json::from_slice(&bytes).unwrap();
    let mut again = serde_json::to_vec_pretty(&rep).unwrap();
    again.push(b'\n');
    let (a, b) = (String::from_utf8(again).unwrap(), String::from_utf8(bytes).unwrap());
    let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
    assert_eq!(a, b, "first difference at {at}: {:?}", &a[at.saturating_sub(80)..(at + 40).min(a.len())]);
}

#[test]
fn truth_file_adds_sse_trajectory() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let ex = dir.path().join("exact.json");
    ok(&["exact", "--graph", s(&g), "--k", "3", "--out", s(&ex)]);
    let rep: EstimateReport = serde_json::from_slice(&ok(&[
        "estimate", "--graph", s(&g), "--k", "3", "--steps", "2000", "--truth", s(&ex), "--snapshot-every", "500",
    ]))
    .unwrap();
    let sse = rep.sse.unwrap();
    assert_eq!(sse.iter().map(|p| p.samples).collect::<Vec<_>>(), vec![500, 1000, 1500, 2000]);
    assert!(sse.iter().all(|p| p.sse.is_finite() && p.sse >= 0.0));
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let text = String::from_utf8(ok(&["exact", "--graph", s(&g), "--k", "3", "--format", "csv"])).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank,code,pattern,edges,f"));
    assert!(lines.count() >= 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, format!("graph = {}\nk = 3\nsteps = 7\nrelation = sh:4\n", s(&g))).unwrap();
    let rep: EstimateReport = serde_json::from_slice(&ok(&["estimate", "--config", s(&cfg)])).unwrap();
    assert_eq!((rep.samples, rep.config.relation.as_str()), (7, "sh:4"));
    let rep: EstimateReport = serde_json::from_slice(&ok(&["estimate", "--config", s(&cfg), "--steps", "9"])).unwrap();
    assert_eq!(rep.samples, 9);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(relmine(&["estimate", "--config", s(&cfg)]).status.code(), Some(2));
}

#[test]
fn worker_env_is_below_flags() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let metrics = dir.path().join("m.json");
    let run = |extra: &[&str]| {
        let mut args = vec!["estimate", "--graph", s(&g), "--k", "3", "--steps", "20", "--metrics", s(&metrics)];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_relmine")).args(&args).env("RELMINE_WORKERS", "3").output().unwrap();
        assert!(out.status.success());
        let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&metrics).unwrap()).unwrap();
        m["workers"].as_u64().unwrap()
    };
    assert_eq!(run(&[]), 3);
    assert_eq!(run(&["--workers", "2"]), 2);
}

#[test]
fn truncation_failure_writes_partial_report() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    let out = relmine(&[
        "estimate", "--graph", s(&g), "--k", "3", "--relation", "sh:4", "--budget", "1", "--max-tour-len", "3", "--steps", "50",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rep: EstimateReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep.error.unwrap().contains("exceeded"));
    let out = relmine(&[
        "estimate", "--graph", s(&g), "--k", "3", "--relation", "sh:4", "--budget", "1", "--max-tour-len", "3", "--steps", "50",
        "--allow-truncation",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep: EstimateReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep.truncated_tours > 0);
}

#[test]
fn sweep_with_complete_budget_has_no_spread() {
    let dir = TempDir::new().unwrap();
    let graph = small_graph();
    let g = write_graph(&dir, "g.lg", &graph);
    let anchor = relmine::enumerate_cis(&graph, 3, &FilterFn::None)[0].clone();
    let ids = anchor.nodes().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let rep: SweepReport = serde_json::from_slice(&ok(&[
        "alpha-sweep", "--graph", s(&g), "--relation", "sh:4", "--anchor", &ids, "--budgets", "2,100000", "--tour-counts",
        "5", "--repeats", "4",
    ]))
    .unwrap();
    let exact = exact_alpha_bruteforce(&graph, &anchor, &RelationSpec::SharedHubs(4), &WeightFn::Unit, &FilterFn::None, 10_000)
        .unwrap();
    assert_eq!(rep.exact_alpha, Some(exact));
    let full = &rep.cells[1];
    assert_eq!((full.sd, full.exact_runs), (0.0, 4));
    assert!(full.values.iter().all(|&v| v == exact));
}

#[test]
fn sweep_rejects_disconnected_anchor() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "p.lg", &generators::path(6));
    let out = relmine(&["alpha-sweep", "--graph", s(&g), "--anchor", "0,2,4", "--budgets", "5", "--tour-counts", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_zero_is_empty() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "g.lg", &small_graph());
    assert!(ok(&["export", "--graph", s(&g), "--k", "3", "--n", "0"]).is_empty());
}

fn export(args: &[&str]) -> Vec<ExportRecord> {
    String::from_utf8(ok(args)).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn identity_export_carries_exact_weights() {
    let dir = TempDir::new().unwrap();
    let graph = small_graph();
    let g = write_graph(&dir, "g.lg", &graph);
    let recs = export(&["export", "--graph", s(&g), "--k", "3", "--n", "200", "--weight", "hondeg"]);
    assert_eq!(recs.len(), 200);
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r.index, i);
        assert_eq!(r.alpha1, relmine::hon_degree(&graph, &r.nodes, &FilterFn::None) as f64);
        assert_eq!(r.code, relmine::canonical_code(&graph, &r.nodes).unwrap());
    }
}

#[test]
fn exported_estimates_average_to_class_weights() {
    let dir = TempDir::new().unwrap();
    let graph = small_graph();
    let g = write_graph(&dir, "g.lg", &graph);
    let rel = RelationSpec::SharedHubs(4);
    let mut errors = Vec::new();
    for seed in 0..20 {
        let recs = export(&[
            "export", "--graph", s(&g), "--k", "3", "--relation", "sh:4", "--budget", "2", "--tours", "20", "--n", "30",
            "--seed", &seed.to_string(),
        ]);
        let mut seen = std::collections::BTreeSet::new();
        for r in recs {
            let class = relmine::exact_class(&graph, &r.nodes, &rel, &FilterFn::None, 10_000).unwrap();
            if seen.insert(class[0].clone()) {
                errors.push(r.alpha1 / class.len() as f64 - 1.0);
            }
        }
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let sd = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "mean relative error {mean}, sd {sd}, n {n}");
}

#[test]
fn anchor_ids_must_exist() {
    let graph = generators::path(4);
    assert!(induced_subgraph(&graph, &[0, 9]).is_err());
    let dir = TempDir::new().unwrap();
    let g = write_graph(&dir, "p.lg", &graph);
    let out = relmine(&["alpha-sweep", "--graph", s(&g), "--anchor", "0,9", "--budgets", "5", "--tour-counts", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lenient_flag_accepts_duplicate_edges() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dup.lg");
    std::fs::write(&path, "v 0 1\nv 1 1\nv 2 1\ne 0 1\ne 1 0\ne 1 2\n").unwrap();
    assert_eq!(relmine(&["exact", "--graph", s(&path), "--k", "2"]).status.code(), Some(2));
    ok(&["exact", "--graph", s(&path), "--k", "2", "--lenient"]);
    let g = AttributedGraph::load(std::fs::read(&path).unwrap().as_slice(), GraphFormat::Lg, Strictness::Lenient).unwrap();
    assert_eq!(g.edge_count(), 2);
}
