use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rumor_core::baselines::rumor_centrality_tree;
use rumor_core::bench::{gen_random_tree, star};
use rumor_core::graph::{load_edge_list, subtree_sizes};
use rumor_core::likelihood::{exact_tree_likelihood, mp_likelihood, regular_ratio, EXACT_NODE_CAP};
use rumor_core::{detect_source, Graph, Method, QuadratureConfig, RumorSnapshot};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Grows a connected infected set of `n` nodes inside a `d`-regular tree
/// and returns the finite ball that contains it plus every boundary node.
fn regular_snapshot(d: usize, n: usize, t: f64, seed: u64) -> (Graph, RumorSnapshot) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut degree = vec![0usize];
    let mut infected = vec![0usize];
    let mut open = vec![0usize];
    while infected.len() < n {
        let idx = rng.random_range(0..open.len());
        let u = open[idx];
        let v = degree.len();
        degree.push(1);
        degree[u] += 1;
        edges.push((u, v));
        infected.push(v);
        open.push(v);
        if degree[u] == d {
            open.swap_remove(idx);
        }
    }
    for &u in &infected {
        while degree[u] < d {
            let v = degree.len();
            degree.push(1);
            degree[u] += 1;
            edges.push((u, v));
        }
    }
    let g = Graph::from_edges(degree.len(), edges).unwrap();
    let s = RumorSnapshot::new(&g, infected, t).unwrap();
    (g, s)
}

#[test]
fn snap_format_file_loads_with_declared_counts() {
    let (nodes, edges) = (4039usize, 88234usize);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = std::collections::HashSet::new();
    let mut text = format!("# Directed graph (each unordered pair of nodes is saved once)\n# Nodes: {nodes} Edges: {edges}\n# FromNodeId\tToNodeId\n");
    for v in 1..nodes {
        let u = rng.random_range(0..v);
        seen.insert((u, v));
        text.push_str(&format!("{u}\t{v}\n"));
    }
    while seen.len() < edges {
        let (a, b) = (rng.random_range(0..nodes), rng.random_range(0..nodes));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            text.push_str(&format!("{a}\t{b}\n"));
        }
    }
    let g = load_edge_list(text.as_bytes()).unwrap();
    assert_eq!(g.node_count(), nodes);
    assert_eq!(g.edge_count(), edges);
}

#[test]
fn message_passing_is_exact_at_the_center_of_a_spider() {
    for (arms, len) in [(2, 3), (3, 2), (4, 2), (5, 1)] {
        let g = star(arms, len + 1).unwrap();
        let infected: Vec<usize> = std::iter::once(0)
            .chain((0..arms).flat_map(|a| (0..len).map(move |j| 1 + a * (len + 1) + j)))
            .collect();
        for t in [0.3, 1.0, 4.0] {
            let s = RumorSnapshot::new(&g, infected.iter().copied(), t).unwrap();
            let mp = mp_likelihood(&g, &s, 0, &q()).unwrap();
            let exact = exact_tree_likelihood(&g, &s, 0, &q()).unwrap();
            assert!((mp.value() - exact.value()).abs() < 1e-8, "arms {arms} len {len} T {t}");
        }
    }
}

#[test]
fn message_passing_never_exceeds_the_exact_likelihood() {
    for seed in 0..40u64 {
        let n = 2 + seed as usize % 7;
        let (g, s) = regular_snapshot(3, n, 1.0 + (seed % 3) as f64, seed);
        for &v in s.infected() {
            let mp = mp_likelihood(&g, &s, v, &q()).unwrap();
            let exact = exact_tree_likelihood(&g, &s, v, &q()).unwrap();
            assert!(mp.value() <= exact.value() + 1e-9, "seed {seed} node {v}: {mp} > {exact}");
        }
    }
}

#[test]
fn regular_tree_ratios_do_not_depend_on_time() {
    for seed in 0..12u64 {
        let n = 3 + seed as usize % 5;
        let d = 3 + seed as usize % 2;
        let (g, s) = regular_snapshot(d, n, 1.0, seed);
        let sizes = subtree_sizes(&g, &s).unwrap();
        for (u, v) in g.edges().filter(|&(u, v)| s.contains(u) && s.contains(v)) {
            let expect = regular_ratio(&sizes, u, v, n).unwrap();
            for t in [0.4, 1.5, 3.0] {
                let st = s.with_time(t).unwrap();
                let pu = exact_tree_likelihood(&g, &st, u, &q()).unwrap();
                let pv = exact_tree_likelihood(&g, &st, v, &q()).unwrap();
                let got = (pu.value() - pv.value()).exp();
                assert!(((got - expect) / expect).abs() < 1e-6, "seed {seed} ({u},{v}) T {t}: {got} vs {expect}");
            }
        }
    }
}

#[test]
fn rumor_centrality_ratio_matches_subtree_sizes() {
    for seed in 0..20u64 {
        let n = 2 + seed as usize % 10;
        let g = gen_random_tree(n, seed).unwrap();
        let s = RumorSnapshot::new(&g, 0..n, 1.0).unwrap();
        let scores = rumor_centrality_tree(&g, &s).unwrap().score;
        let sizes = subtree_sizes(&g, &s).unwrap();
        for (u, v) in g.edges() {
            let got = (scores[&u] - scores[&v]).exp();
            let expect = regular_ratio(&sizes, u, v, n).unwrap();
            assert!(((got - expect) / expect).abs() < 1e-12, "seed {seed} ({u},{v})");
        }
    }
}

#[test]
fn snapshot_probabilities_sum_to_one() {
    // every outcome from source 0 on a path is a prefix 0..k
    let g = Graph::from_edges(6, (1..6).map(|i| (i - 1, i))).unwrap();
    for t in [0.5, 2.0] {
        let total: f64 = (1..=6)
            .map(|k| {
                let s = RumorSnapshot::new(&g, 0..k, t).unwrap();
                exact_tree_likelihood(&g, &s, 0, &q()).unwrap().probability()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "T {t}: {total}");
    }
    // on a star every subset of leaves is a possible outcome
    let g = star(4, 1).unwrap();
    let total: f64 = (0u32..16)
        .map(|mask| {
            let leaves = (1..=4).filter(|l| mask & (1 << (l - 1)) != 0);
            let s = RumorSnapshot::new(&g, std::iter::once(0).chain(leaves), 1.3).unwrap();
            exact_tree_likelihood(&g, &s, 0, &q()).unwrap().probability()
        })
        .sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn exact_cap_is_enforced_above_the_limit() {
    let (g, s) = regular_snapshot(3, EXACT_NODE_CAP + 1, 1.0, 3);
    assert!(exact_tree_likelihood(&g, &s, 0, &q()).is_err());
    assert!(mp_likelihood(&g, &s, 0, &q()).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn detection_commutes_with_relabeling(seed in 0u64..1000, n in 3usize..16, t in 0.2f64..4.0) {
        let g = gen_random_tree(n, seed).unwrap();
        let infected: Vec<usize> = rumor_core::graph::bfs_tree(&g, 0, |_| true).order.into_iter().take(n / 2 + 1).collect();
        let s = RumorSnapshot::new(&g, infected, t).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pg = g.relabel(&perm);
        let ps = s.relabel(&pg, &perm).unwrap();
        for method in [Method::Starlike, Method::MpTree, Method::RcBfs, Method::Jordan, Method::Distance] {
            let a = detect_source(&g, &s, method, &q(), 1).unwrap();
            let b = detect_source(&pg, &ps, method, &q(), 1).unwrap();
            let mut mapped: Vec<usize> = a.tied.iter().map(|&v| perm[v]).collect();
            mapped.sort_unstable();
            prop_assert_eq!(&mapped, &b.tied);
            for r in &a.ranking {
                let other = b.ranking.iter().find(|x| x.node == perm[r.node]).unwrap();
                prop_assert!((r.log_score - other.log_score).abs() <= 1e-9 * r.log_score.abs().max(1.0));
            }
        }
    }
}
