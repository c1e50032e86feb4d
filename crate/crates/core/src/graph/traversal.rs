use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::Graph;

/// Breadth-first search tree. Neighbors are visited in ascending id order,
/// so the parent of every node is its lowest-numbered neighbor at the
/// previous level.
#[derive(Debug, Clone)]
pub struct BfsTree {
    pub root: usize,
    /// Visit order; `order[0] == root`.
    pub order: Vec<usize>,
    parent: Vec<Option<usize>>,
    depth: Vec<Option<usize>>,
}

impl BfsTree {
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> Option<usize> {
        self.depth[v]
    }

    pub fn reached(&self, v: usize) -> bool {
        self.depth[v].is_some()
    }

    /// Children lists in visit order, indexed by node id.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.parent.len()];
        for &v in &self.order[1..] {
            if let Some(p) = self.parent[v] {
                children[p].push(v);
            }
        }
        children
    }
}

/// BFS from `root` restricted to nodes accepted by `member`.
pub fn bfs_tree(g: &Graph, root: usize, member: impl Fn(usize) -> bool) -> BfsTree {
    let n = g.node_count();
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    depth[root] = Some(0);
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let du = depth[u].unwrap_or(0);
        for &w in g.neighbors(u) {
            if depth[w].is_none() && member(w) {
                depth[w] = Some(du + 1);
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    BfsTree {
        root,
        order,
        parent,
        depth,
    }
}

/// Hop distances from `source`, optionally restricted to the subgraph
/// induced by `within`. Unreachable nodes are absent.
pub fn bfs_distances(
    g: &Graph,
    source: usize,
    within: Option<&BTreeSet<usize>>,
) -> BTreeMap<usize, usize> {
    let tree = match within {
        Some(set) => bfs_tree(g, source, |v| set.contains(&v)),
        None => bfs_tree(g, source, |_| true),
    };
    tree.order
        .iter()
        .map(|&v| (v, tree.depth[v].unwrap_or(0)))
        .collect()
}

/// Nodes of the connected component containing `v`, in BFS order.
pub fn connected_component(g: &Graph, v: usize) -> Vec<usize> {
    bfs_tree(g, v, |_| true).order
}
