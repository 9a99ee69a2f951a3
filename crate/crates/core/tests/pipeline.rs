use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relmine::{
    estimate_alpha, estimate_f, exact_f, generators, induced_subgraph, run_job, AlphaConfig, AttributedGraph,
    FConfig, FMode, FilterFn, GraphFormat, JobConfig, Model, RelationSpec, Strictness, WeightFn,
    DEFAULT_ENUMERATION_CAP,
};

fn graph() -> AttributedGraph {
    let g = generators::connected_gnp(14, 0.3, 2, &mut ChaCha8Rng::seed_from_u64(11));
    AttributedGraph::load(g.to_lg().as_bytes(), GraphFormat::Lg, Strictness::Strict).unwrap()
}

#[test]
fn lg_round_trip() {
    let g = generators::connected_gnp(14, 0.3, 2, &mut ChaCha8Rng::seed_from_u64(11));
    assert_eq!(graph(), g);
}

#[test]
fn job_matches_sequential_estimate() {
    let g = graph();
    let cfg = JobConfig { k: 3, relation: "sh:4".into(), budget: 5, tours: 8, steps: 200, workers: 3, seed: 9, ..Default::default() };
    let (rel, w, h) = cfg.model_parts().unwrap();
    let seq = estimate_f(&Model::new(&g, &rel, &w, &h), &cfg.f_config(), cfg.seed).unwrap();
    let par = run_job(&cfg, &g).unwrap();
    assert_eq!(par.estimate, seq);
}

#[test]
fn identity_estimate_sums_to_one_and_tracks_exact() {
    let g = graph();
    let (rel, w, h) = (RelationSpec::Identity, WeightFn::Unit, FilterFn::None);
    let model = Model::new(&g, &rel, &w, &h);
    let cfg = FConfig { k: 3, samples: 20_000, ..FConfig::default() };
    let est = estimate_f(&model, &cfg, 5).unwrap();
    let total: f64 = est.patterns.values().sum();
    assert!((total - 1.0).abs() < 1e-9);
    let exact = exact_f(&g, 3, &rel, &w, &h, FMode::Standard, DEFAULT_ENUMERATION_CAP).unwrap().f_map();
    for (p, f) in &exact {
        let e = est.patterns.get(p).copied().unwrap_or(0.0);
        assert!((e - f).abs() < 0.05, "{p:?}: {e} vs {f}");
    }
}

#[test]
fn complete_supernode_is_exact() {
    let g = graph();
    let (rel, w, h) = (RelationSpec::Perc, WeightFn::HonDegree, FilterFn::None);
    let anchor = induced_subgraph(&g, &[0, 1, 2]).or_else(|_| induced_subgraph(&g, &[0, 1])).unwrap();
    let exact = relmine::exact_alpha_bruteforce(&g, &anchor, &rel, &w, &h, DEFAULT_ENUMERATION_CAP).unwrap();
    let cfg = AlphaConfig { budget: usize::MAX, ..AlphaConfig::default() };
    let est = estimate_alpha(&Model::new(&g, &rel, &w, &h), &anchor, &cfg, 1).unwrap();
    assert!(est.exact);
    assert_eq!(est.value, exact);
}
