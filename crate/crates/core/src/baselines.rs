//! Centrality estimators used as baselines: rumor centrality, Jordan center
//! and distance center. Every score is oriented so that larger is better.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{bfs_distances, bfs_tree, require_tree, Graph, RumorSnapshot};
use crate::likelihood::special::ln_factorial;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityScores {
    pub score: BTreeMap<usize, f64>,
}

/// `ln N! - sum ln |subtree|` over the tree spanned by `parent` from `order`.
fn log_rumor_centrality(order: &[usize], parent: impl Fn(usize) -> Option<usize>, n_nodes: usize) -> f64 {
    let mut below = vec![1usize; n_nodes];
    let mut total = ln_factorial(order.len());
    for &v in order.iter().rev() {
        total -= (below[v] as f64).ln();
        if let Some(p) = parent(v) {
            below[p] += below[v];
        }
    }
    total
}

/// Log rumor centrality of every infected node of a tree snapshot, by one
/// downward pass from a reference root and one ratio-propagation pass.
pub fn rumor_centrality_tree(g: &Graph, snap: &RumorSnapshot) -> Result<CentralityScores> {
    require_tree(g, snap)?;
    let n = snap.len();
    let tree = bfs_tree(g, snap.infected()[0], |v| snap.contains(v));
    let mut below = vec![1usize; g.node_count()];
    for &v in tree.order.iter().rev() {
        if let Some(p) = tree.parent(v) {
            below[p] += below[v];
        }
    }
    let mut log_r = vec![0.0; g.node_count()];
    let root = tree.order[0];
    log_r[root] = ln_factorial(n) - tree.order.iter().map(|&v| (below[v] as f64).ln()).sum::<f64>();
    for &v in &tree.order[1..] {
        let p = tree.parent(v).expect("non-root has a parent");
        log_r[v] = log_r[p] + (below[v] as f64).ln() - ((n - below[v]) as f64).ln();
    }
    Ok(CentralityScores {
        score: tree.order.iter().map(|&v| (v, log_r[v])).collect(),
    })
}

/// Rumor centrality of each candidate computed on the breadth-first tree of
/// the infected subgraph rooted at that candidate.
pub fn rumor_centrality_bfs(g: &Graph, snap: &RumorSnapshot) -> CentralityScores {
    let score = snap
        .infected()
        .par_iter()
        .map(|&v| {
            let tree = bfs_tree(g, v, |w| snap.contains(w));
            (v, log_rumor_centrality(&tree.order, |w| tree.parent(w), g.node_count()))
        })
        .collect();
    CentralityScores { score }
}

fn distance_scores(g: &Graph, snap: &RumorSnapshot, reduce: fn(&BTreeMap<usize, usize>) -> f64) -> CentralityScores {
    let members = snap.infected().iter().copied().collect();
    let score = snap
        .infected()
        .par_iter()
        .map(|&v| (v, reduce(&bfs_distances(g, v, Some(&members)))))
        .collect();
    CentralityScores { score }
}

/// Negative eccentricity inside the infected subgraph.
pub fn jordan_center(g: &Graph, snap: &RumorSnapshot) -> CentralityScores {
    distance_scores(g, snap, |d| -(d.values().copied().max().unwrap_or(0) as f64))
}

/// Negative sum of hop distances inside the infected subgraph.
pub fn distance_center(g: &Graph, snap: &RumorSnapshot) -> CentralityScores {
    distance_scores(g, snap, |d| -(d.values().sum::<usize>() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn best(s: &CentralityScores) -> Vec<usize> {
        let max = s.score.values().copied().fold(f64::NEG_INFINITY, f64::max);
        s.score.iter().filter(|(_, &v)| v >= max - 1e-9).map(|(&k, _)| k).collect()
    }

    fn small_tree() -> (Graph, RumorSnapshot) {
        let g = Graph::from_edges(
            10,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7), (5, 8), (5, 9)],
        )
        .unwrap();
        let s = RumorSnapshot::new(&g, [1, 2, 3, 5], 1.0).unwrap();
        (g, s)
    }

    #[test]
    fn rumor_centrality_small_cases() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = RumorSnapshot::new(&star, 0..4, 1.0).unwrap();
        let r = rumor_centrality_tree(&star, &s).unwrap();
        assert!((r.score[&0].exp() - 6.0).abs() < 1e-12);
        assert!((r.score[&2].exp() - 2.0).abs() < 1e-12);

        let g = path(3);
        let r = rumor_centrality_tree(&g, &RumorSnapshot::new(&g, 0..3, 1.0).unwrap()).unwrap();
        assert!((r.score[&1].exp() - 2.0).abs() < 1e-12);
        assert!((r.score[&0].exp() - 1.0).abs() < 1e-12);

        let r = rumor_centrality_tree(&g, &RumorSnapshot::new(&g, [2], 1.0).unwrap()).unwrap();
        assert_eq!(r.score[&2], 0.0);
    }

    #[test]
    fn bfs_variant_on_trees_and_cycles() {
        let (g, s) = small_tree();
        let exact = rumor_centrality_tree(&g, &s).unwrap();
        let bfs = rumor_centrality_bfs(&g, &s);
        for (v, x) in &exact.score {
            assert!((x - bfs.score[v]).abs() < 1e-12);
        }
        for n in [3, 4] {
            let cyc = Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
            let s = RumorSnapshot::new(&cyc, 0..n, 1.0).unwrap();
            let r = rumor_centrality_bfs(&cyc, &s);
            assert_eq!(best(&r).len(), n);
        }
    }

    #[test]
    fn jordan_and_distance() {
        let g = path(5);
        let s3 = RumorSnapshot::new(&g, 0..3, 1.0).unwrap();
        assert_eq!(best(&jordan_center(&g, &s3)), vec![1]);
        let s4 = RumorSnapshot::new(&g, 0..4, 1.0).unwrap();
        assert_eq!(best(&jordan_center(&g, &s4)), vec![1, 2]);
        let s5 = RumorSnapshot::new(&g, 0..5, 1.0).unwrap();
        assert_eq!(best(&distance_center(&g, &s5)), vec![2]);

        let (g, s) = small_tree();
        let j = jordan_center(&g, &s);
        assert_eq!(best(&j), vec![1, 2]);
        assert_eq!(j.score[&2], -2.0);
        let d = distance_center(&g, &s);
        assert_eq!(best(&d), vec![1, 2]);
        assert_eq!(d.score[&2], -4.0);
        assert_eq!(d.score[&5], -6.0);
    }

    #[test]
    fn star_center_wins_everywhere() {
        let g = Graph::from_edges(5, (1..5).map(|v| (0, v))).unwrap();
        let s = RumorSnapshot::new(&g, 0..5, 1.0).unwrap();
        assert_eq!(best(&distance_center(&g, &s)), vec![0]);
        assert_eq!(best(&jordan_center(&g, &s)), vec![0]);
        assert_eq!(best(&rumor_centrality_bfs(&g, &s)), vec![0]);
    }
}
