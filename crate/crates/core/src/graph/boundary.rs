use std::collections::BTreeMap;

use super::{Graph, RumorSnapshot};
use crate::error::{Error, Result};

/// How a snapshot sits inside its graph.
///
/// A boundary node is an uninfected node adjacent to the infected set. It
/// is a pseudo-leaf when at least one of its infected neighbors is not a
/// leaf of the infected subgraph. The closure is the infected set plus all
/// pseudo-leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryView {
    /// Infected nodes of degree at most one inside the infected subgraph.
    pub gn_leaves: Vec<usize>,
    /// Uninfected nodes at hop distance one from the infected set.
    pub boundary: Vec<usize>,
    pub pseudo_leaves: Vec<usize>,
    /// Uninfected-neighbor count for every infected node.
    pub uninfected_neighbor_count: BTreeMap<usize, usize>,
    /// Infected nodes and pseudo-leaves, ascending.
    pub closure_nodes: Vec<usize>,
    in_closure: Vec<bool>,
}

impl BoundaryView {
    pub fn in_closure(&self, v: usize) -> bool {
        self.in_closure.get(v).copied().unwrap_or(false)
    }

    /// Number of infected-to-uninfected edges.
    pub fn cut_size(&self) -> usize {
        self.uninfected_neighbor_count.values().sum()
    }
}

pub fn boundary(g: &Graph, snap: &RumorSnapshot) -> Result<BoundaryView> {
    if !snap.is_connected(g) {
        return Err(Error::NotConnected);
    }
    let n = g.node_count();
    let mut gn_degree = vec![0usize; n];
    let mut uninfected_neighbor_count = BTreeMap::new();
    let mut gn_leaves = Vec::new();
    for &v in snap.infected() {
        let inner = snap.infected_degree(g, v);
        gn_degree[v] = inner;
        uninfected_neighbor_count.insert(v, g.degree(v) - inner);
        if inner <= 1 {
            gn_leaves.push(v);
        }
    }

    let mut is_boundary = vec![false; n];
    let mut is_pseudo = vec![false; n];
    for &v in snap.infected() {
        for &w in g.neighbors(v) {
            if !snap.contains(w) {
                is_boundary[w] = true;
                if gn_degree[v] > 1 {
                    is_pseudo[w] = true;
                }
            }
        }
    }
    let boundary: Vec<usize> = (0..n).filter(|&v| is_boundary[v]).collect();
    let pseudo_leaves: Vec<usize> = (0..n).filter(|&v| is_pseudo[v]).collect();
    let in_closure: Vec<bool> = (0..n).map(|v| snap.contains(v) || is_pseudo[v]).collect();
    let closure_nodes = (0..n).filter(|&v| in_closure[v]).collect();
    Ok(BoundaryView {
        gn_leaves,
        boundary,
        pseudo_leaves,
        uninfected_neighbor_count,
        closure_nodes,
        in_closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    /// 3-regular tree fragment around the infected path v3-v1-v2-v5.
    fn small_tree() -> Graph {
        Graph::from_edges(
            10,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7), (5, 8), (5, 9)],
        )
        .unwrap()
    }

    #[test]
    fn small_tree_boundary_and_pseudo_leaves() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [1, 2, 3, 5], 1.0).unwrap();
        let b = boundary(&g, &snap).unwrap();
        assert_eq!(b.boundary, vec![0, 4, 6, 7, 8, 9]);
        assert_eq!(b.pseudo_leaves, vec![0, 4]);
        assert_eq!(b.gn_leaves, vec![3, 5]);
        assert_eq!(b.closure_nodes, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(b.cut_size(), 6);
    }

    #[test]
    fn everything_infected_has_no_boundary() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, 0..10, 1.0).unwrap();
        let b = boundary(&g, &snap).unwrap();
        assert!(b.boundary.is_empty() && b.pseudo_leaves.is_empty());
        assert_eq!(b.closure_nodes.len(), 10);
    }

    #[test]
    fn single_node_snapshot() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [2], 1.0).unwrap();
        let b = boundary(&g, &snap).unwrap();
        assert_eq!(b.gn_leaves, vec![2]);
        assert_eq!(b.uninfected_neighbor_count[&2], 3);
        assert!(b.pseudo_leaves.is_empty());
        assert_eq!(b.closure_nodes, vec![2]);
    }

    #[test]
    fn snapshot_from_other_graph_is_rejected() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [1, 2], 1.0).unwrap();
        let other = Graph::from_edges(10, [(1, 3), (2, 4)]).unwrap();
        assert!(matches!(boundary(&other, &snap), Err(Error::NotConnected)));
    }

    fn random_connected_case(n: usize, seed: u64) -> (Graph, RumorSnapshot) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rand::Rng::random_range(&mut rng, 0..v);
            edges.push((u, v));
        }
        for _ in 0..n / 2 {
            let u = rand::Rng::random_range(&mut rng, 0..n);
            let v = rand::Rng::random_range(&mut rng, 0..n);
            if u != v {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let k = 1 + (seed as usize % n);
        let set: Vec<usize> = crate::graph::bfs_tree(&g, 0, |_| true).order[..k].to_vec();
        let snap = RumorSnapshot::new(&g, set, 1.0).unwrap();
        (g, snap)
    }

    proptest! {
        #[test]
        fn invariants_and_relabeling(n in 2usize..14, seed in any::<u64>()) {
            let (g, snap) = random_connected_case(n, seed);
            let b = boundary(&g, &snap).unwrap();
            prop_assert_eq!(b.closure_nodes.len(), snap.len() + b.pseudo_leaves.len());
            let cut = g.edges().filter(|&(u, v)| snap.contains(u) != snap.contains(v)).count();
            prop_assert_eq!(b.cut_size(), cut);
            for &p in &b.pseudo_leaves {
                prop_assert!(!snap.contains(p));
                prop_assert!(g.neighbors(p).iter().any(|&w| snap.contains(w) && snap.infected_degree(&g, w) > 1));
            }

            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let pg = g.relabel(&perm);
            let ps = snap.relabel(&pg, &perm).unwrap();
            let pb = boundary(&pg, &ps).unwrap();
            let map = |xs: &[usize]| { let mut v: Vec<usize> = xs.iter().map(|&x| perm[x]).collect(); v.sort(); v };
            prop_assert_eq!(map(&b.pseudo_leaves), pb.pseudo_leaves);
            prop_assert_eq!(map(&b.boundary), pb.boundary);
            prop_assert_eq!(map(&b.gn_leaves), pb.gn_leaves);
            for (&v, &c) in &b.uninfected_neighbor_count {
                prop_assert_eq!(pb.uninfected_neighbor_count[&perm[v]], c);
            }
        }
    }
}
