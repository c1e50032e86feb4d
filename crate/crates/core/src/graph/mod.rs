//! Undirected simple graphs with dense integer node ids, plus the views a
//! rumor snapshot induces on them: BFS distances, the rumor boundary and
//! closure, rooted trees and subtree sizes.

mod boundary;
mod io;
mod rooted;
mod snapshot;
mod traversal;

pub use boundary::{boundary, BoundaryView};
pub use io::{load_edge_list, load_labeled_edge_list, parse_edge_list, IdTable};
pub(crate) use rooted::require_tree;
pub use rooted::{root_tree, subtree_sizes, RootedView, SubtreeSizes};
pub use snapshot::{parse_infected_set, InfectedSet, RumorSnapshot};
pub use traversal::{bfs_distances, bfs_tree, connected_component, BfsTree};

use crate::error::{Error, Result};

/// Immutable undirected simple graph. Neighbor lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge iterator. Duplicate edges (in either
    /// orientation) collapse to one; self-loops and out-of-range ids are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self::from_raw_adjacency(adjacency))
    }

    pub(crate) fn from_raw_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adjacency,
            edge_count: twice / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.node_count()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// True when every connected component is a tree.
    pub fn is_forest(&self) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut components = 0;
        for s in 0..self.node_count() {
            if !seen[s] {
                components += 1;
                connected_component(self, s).into_iter().for_each(|v| seen[v] = true);
            }
        }
        self.edge_count + components == self.node_count()
    }

    /// Applies the node permutation `perm` (old id -> new id).
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.node_count(), "permutation size mismatch");
        let mut adjacency = vec![Vec::new(); self.node_count()];
        for (u, list) in self.adjacency.iter().enumerate() {
            adjacency[perm[u]] = list.iter().map(|&v| perm[v]).collect();
        }
        Self::from_raw_adjacency(adjacency)
    }

    /// Edge-list text with a `# nodes N` header, one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {}\n", self.node_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}
