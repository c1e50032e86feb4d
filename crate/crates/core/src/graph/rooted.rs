use std::collections::BTreeMap;

use super::{bfs_tree, boundary, Graph, RumorSnapshot};
use crate::error::{Error, Result};

/// A tree-shaped snapshot rooted at a candidate source, extended with the
/// pseudo-leaves of the rumor closure. Each pseudo-leaf hangs below the
/// first infected neighbor reached by the traversal.
#[derive(Debug, Clone)]
pub struct RootedView {
    pub root: usize,
    /// Closure nodes in breadth-first order from the root.
    pub order: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<Option<usize>>,
}

impl RootedView {
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(v).copied().flatten()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> Option<usize> {
        self.depth.get(v).copied().flatten()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.depth(v).is_some()
    }

    pub fn height(&self) -> usize {
        self.order
            .iter()
            .filter_map(|&v| self.depth(v))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn require_tree(g: &Graph, snap: &RumorSnapshot) -> Result<()> {
    if !snap.is_connected(g) {
        return Err(Error::NotConnected);
    }
    if !snap.is_tree(g) {
        return Err(Error::Cyclic);
    }
    Ok(())
}

pub fn root_tree(g: &Graph, snap: &RumorSnapshot, root: usize) -> Result<RootedView> {
    require_tree(g, snap)?;
    if !snap.contains(root) {
        return Err(Error::invalid(format!("root {root} is not infected")));
    }
    let view = boundary(g, snap)?;
    let inner = bfs_tree(g, root, |v| snap.contains(v));
    let n = g.node_count();
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for &v in &inner.order {
        parent[v] = inner.parent(v);
        depth[v] = inner.depth(v);
        if let Some(p) = parent[v] {
            children[p].push(v);
        }
    }
    let mut order = inner.order.clone();
    for &v in &inner.order {
        let dv = depth[v].unwrap_or(0);
        for &w in g.neighbors(v) {
            if view.pseudo_leaves.binary_search(&w).is_ok() && depth[w].is_none() {
                depth[w] = Some(dv + 1);
                parent[w] = Some(v);
                children[v].push(w);
            }
        }
    }
    // pseudo-leaves sit at most one level below the deepest infected node,
    // so a stable sort by depth restores breadth-first order
    order.extend(view.pseudo_leaves.iter().copied());
    order.sort_by_key(|&v| depth[v]);
    Ok(RootedView {
        root,
        order,
        parent,
        children,
        depth,
    })
}

/// Sizes of the two sides of every tree edge: `get(u, v)` is the number of
/// infected nodes in the subtree hanging from `v` when the tree is rooted
/// at `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeSizes {
    pub n: usize,
    size: BTreeMap<(usize, usize), usize>,
}

impl SubtreeSizes {
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.size.get(&(u, v)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.size.iter().map(|(&k, &s)| (k, s))
    }
}

pub fn subtree_sizes(g: &Graph, snap: &RumorSnapshot) -> Result<SubtreeSizes> {
    require_tree(g, snap)?;
    let n = snap.len();
    let tree = bfs_tree(g, snap.infected()[0], |v| snap.contains(v));
    let mut below = vec![1usize; g.node_count()];
    let mut size = BTreeMap::new();
    for &v in tree.order.iter().rev() {
        if let Some(p) = tree.parent(v) {
            below[p] += below[v];
            size.insert((p, v), below[v]);
            size.insert((v, p), n - below[v]);
        }
    }
    Ok(SubtreeSizes { n, size })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_tree() -> Graph {
        Graph::from_edges(
            10,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7), (5, 8), (5, 9)],
        )
        .unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn three_path_rooted_at_middle() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let snap = RumorSnapshot::new(&g, [0, 1, 2], 1.0).unwrap();
        let r = root_tree(&g, &snap, 1).unwrap();
        assert_eq!([r.depth(0), r.depth(1), r.depth(2)], [Some(1), Some(0), Some(1)]);
        assert_eq!(r.children(1), &[0, 2]);
    }

    #[test]
    fn small_tree_rooted_at_v1() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [1, 2, 3, 5], 1.0).unwrap();
        let r = root_tree(&g, &snap, 1).unwrap();
        assert_eq!(r.depth(5), Some(2));
        assert_eq!(r.parent(5), Some(2));
        // pseudo-leaves hang below their infected neighbor
        assert_eq!(r.parent(0), Some(1));
        assert_eq!(r.depth(4), Some(2));
        assert!(!r.contains(8));
        assert_eq!(r.order, vec![1, 2, 3, 0, 5, 4]);
        let depths: Vec<_> = r.order.iter().map(|&v| r.depth(v).unwrap()).collect();
        assert!(depths.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn star_rooted_at_leaf() {
        let g = star(4);
        let snap = RumorSnapshot::new(&g, 0..5, 1.0).unwrap();
        let r = root_tree(&g, &snap, 3).unwrap();
        assert_eq!(r.depth(0), Some(1));
        for leaf in [1, 2, 4] {
            assert_eq!(r.depth(leaf), Some(2));
        }
        assert_eq!(r.height(), 2);
    }

    #[test]
    fn cycle_is_rejected() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let snap = RumorSnapshot::new(&g, [0, 1, 2], 1.0).unwrap();
        assert!(matches!(root_tree(&g, &snap, 0), Err(Error::Cyclic)));
        assert!(matches!(subtree_sizes(&g, &snap), Err(Error::Cyclic)));
    }

    #[test]
    fn uninfected_root_is_rejected() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [1, 2], 1.0).unwrap();
        assert!(root_tree(&g, &snap, 0).is_err());
    }

    #[test]
    fn sizes_on_small_tree_path_and_star() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, [1, 2, 3, 5], 1.0).unwrap();
        let s = subtree_sizes(&g, &snap).unwrap();
        assert_eq!(s.get(3, 1), Some(3));
        assert_eq!(s.get(1, 3), Some(1));

        let p = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let ps = subtree_sizes(&p, &RumorSnapshot::new(&p, 0..4, 1.0).unwrap()).unwrap();
        assert_eq!((ps.get(1, 2), ps.get(2, 1)), (Some(2), Some(2)));

        let st = star(3);
        let ss = subtree_sizes(&st, &RumorSnapshot::new(&st, 0..4, 1.0).unwrap()).unwrap();
        assert_eq!((ss.get(0, 2), ss.get(2, 0)), (Some(1), Some(3)));
    }

    #[test]
    fn sizes_complement_and_root_children_sum() {
        let g = small_tree();
        let snap = RumorSnapshot::new(&g, 0..10, 1.0).unwrap();
        let s = subtree_sizes(&g, &snap).unwrap();
        for ((u, v), size) in s.iter() {
            assert_eq!(size + s.get(v, u).unwrap(), 10);
        }
        for root in 0..10 {
            let total: usize = g.neighbors(root).iter().map(|&c| s.get(root, c).unwrap()).sum();
            assert_eq!(total, 9);
        }
    }
}
