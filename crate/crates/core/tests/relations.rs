use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relmine::{
    bounded_class_bfs, canonical_code, enumerate_cis, exact_class, generators, partition_classes, related_local,
    AttributedGraph, FilterFn, RelationSpec, Subgraph, WeightFn, DEFAULT_ENUMERATION_CAP,
};

/// Attributed isomorphism by trying every bijection.
fn isomorphic(g: &AttributedGraph, a: &Subgraph, b: &Subgraph) -> bool {
    let (x, y) = (a.nodes(), b.nodes());
    if x.len() != y.len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..y.len()).collect();
    loop {
        let labels = (0..x.len()).all(|i| g.label(x[i]) == g.label(y[perm[i]]));
        let edges = (0..x.len())
            .all(|i| (0..x.len()).all(|j| g.has_edge(x[i], x[j]) == g.has_edge(y[perm[i]], y[perm[j]])));
        if labels && edges {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn random_graph(seed: u64, n: usize, p: f64, labels: u32) -> AttributedGraph {
    generators::gnp(n, p, labels, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn as_sets(classes: Vec<Vec<Subgraph>>) -> BTreeSet<BTreeSet<Subgraph>> {
    classes.into_iter().map(|c| c.into_iter().collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn local_relations_are_equivalences(seed in any::<u64>(), n in 4usize..10, k in 2usize..5, d in 1usize..5) {
        let g = random_graph(seed, n, 0.45, 2);
        let all = enumerate_cis(&g, k, &FilterFn::None);
        for rel in [RelationSpec::Identity, RelationSpec::SharedHubs(d)] {
            for a in &all {
                prop_assert!(related_local(&rel, &g, a, a));
                for b in &all {
                    let ab = related_local(&rel, &g, a, b);
                    prop_assert_eq!(ab, related_local(&rel, &g, b, a));
                    if ab {
                        prop_assert!(isomorphic(&g, a, b));
                        for c in &all {
                            if related_local(&rel, &g, b, c) {
                                prop_assert!(related_local(&rel, &g, a, c));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_codes_agree_with_isomorphism(seed in any::<u64>(), n in 3usize..9, k in 2usize..5) {
        let g = random_graph(seed, n, 0.5, 2);
        let all = enumerate_cis(&g, k, &FilterFn::None);
        for a in &all {
            for b in &all {
                let same = canonical_code(&g, a).unwrap() == canonical_code(&g, b).unwrap();
                prop_assert_eq!(same, isomorphic(&g, a, b));
            }
        }
    }

    #[test]
    fn large_hub_threshold_gives_isomorphism_classes(seed in any::<u64>(), n in 3usize..10, k in 2usize..5) {
        let g = random_graph(seed, n, 0.4, 2);
        let d = g.max_degree() + 1;
        let classes = partition_classes(&g, k, &RelationSpec::SharedHubs(d), &FilterFn::None, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut by_iso: Vec<Vec<Subgraph>> = Vec::new();
        for s in enumerate_cis(&g, k, &FilterFn::None) {
            match by_iso.iter_mut().find(|c| isomorphic(&g, &c[0], &s)) {
                Some(c) => c.push(s),
                None => by_iso.push(vec![s]),
            }
        }
        prop_assert_eq!(as_sets(classes), as_sets(by_iso));
    }

    #[test]
    fn unbounded_perc_search_finds_the_closure(seed in any::<u64>(), n in 3usize..10, k in 2usize..5) {
        let g = random_graph(seed, n, 0.45, 2);
        let all = enumerate_cis(&g, k, &FilterFn::None);
        // Same-pattern subgraphs sharing k-1 nodes, closed transitively.
        let mut closure: BTreeMap<Subgraph, usize> = BTreeMap::new();
        for (i, s) in all.iter().enumerate() {
            if closure.contains_key(s) {
                continue;
            }
            let mut stack = vec![s.clone()];
            closure.insert(s.clone(), i);
            while let Some(x) = stack.pop() {
                for y in &all {
                    if !closure.contains_key(y) && x.overlap(y) + 1 == k && isomorphic(&g, &x, y) {
                        closure.insert(y.clone(), i);
                        stack.push(y.clone());
                    }
                }
            }
        }
        for s in &all {
            let expected: BTreeSet<Subgraph> =
                all.iter().filter(|t| closure[*t] == closure[s]).cloned().collect();
            let bfs = bounded_class_bfs(&g, s, &RelationSpec::Perc, usize::MAX, &WeightFn::Unit, &FilterFn::None).unwrap();
            prop_assert!(bfs.complete);
            prop_assert_eq!(bfs.members.iter().cloned().collect::<BTreeSet<_>>(), expected.clone());
            prop_assert_eq!(bfs.alpha_partial, expected.len() as f64);
            let exact = exact_class(&g, s, &RelationSpec::Perc, &FilterFn::None, DEFAULT_ENUMERATION_CAP).unwrap();
            prop_assert_eq!(exact.into_iter().collect::<BTreeSet<_>>(), expected);
        }
    }
}

#[test]
fn k4_triangles_form_one_hubless_class() {
    let g = generators::complete(4);
    let classes = partition_classes(&g, 3, &RelationSpec::SharedHubs(4), &FilterFn::None, 100).unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].len(), 4);
}

#[test]
fn c5_paths_percolate_into_one_class() {
    let g = generators::cycle(5);
    let classes = partition_classes(&g, 3, &RelationSpec::Perc, &FilterFn::None, 100).unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].len(), 5);
}
