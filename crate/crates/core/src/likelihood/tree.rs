use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::arms::{arm_log_likelihood, Arm};
use super::leaf::LogLikelihood;
use super::panel::panel_tree_likelihood;
use super::quadrature::{try_integrate_log, QuadratureConfig};
use crate::error::{Error, Result};
use crate::graph::{require_tree, Graph, RumorSnapshot};

/// Default node cap for [`exact_tree_likelihood`].
pub const EXACT_NODE_CAP: usize = 12;

/// One side of the infected tree, rooted at `nodes[0]`, in breadth-first
/// order. An optional blocked neighbor of the root is treated as absent.
#[derive(Debug, Clone)]
pub(crate) struct LocalTree {
    pub nodes: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    pub graph_degree: Vec<usize>,
    /// Uninfected graph neighbors per node.
    pub boundary: Vec<usize>,
}

impl LocalTree {
    pub fn build(g: &Graph, snap: &RumorSnapshot, root: usize, blocked: Option<usize>) -> Result<Self> {
        if !snap.contains(root) {
            return Err(Error::invalid(format!("root {root} is not infected")));
        }
        let n = g.node_count();
        let mut index = vec![usize::MAX; n];
        let mut tree = LocalTree {
            nodes: vec![root],
            parent: vec![None],
            children: vec![Vec::new()],
            depth: vec![0],
            graph_degree: vec![g.degree(root)],
            boundary: vec![snap.uninfected_degree(g, root)],
        };
        index[root] = 0;
        if let Some(b) = blocked {
            if b < n {
                index[b] = usize::MAX - 1;
            }
        }
        let mut queue = VecDeque::from([0usize]);
        let mut inner_edges = 0usize;
        while let Some(i) = queue.pop_front() {
            let v = tree.nodes[i];
            for &w in g.neighbors(v) {
                if !snap.contains(w) || Some(w) == blocked {
                    continue;
                }
                inner_edges += 1;
                if index[w] != usize::MAX {
                    continue;
                }
                let j = tree.nodes.len();
                index[w] = j;
                tree.nodes.push(w);
                tree.parent.push(Some(i));
                tree.children.push(Vec::new());
                tree.children[i].push(j);
                tree.depth.push(tree.depth[i] + 1);
                tree.graph_degree.push(g.degree(w));
                tree.boundary.push(snap.uninfected_degree(g, w));
                queue.push_back(j);
            }
        }
        if inner_edges / 2 + 1 != tree.nodes.len() {
            return Err(Error::Cyclic);
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Arms of the message-passing approximation: one per rooted leaf, one
    /// per boundary edge of every other node.
    pub fn arms(&self) -> Vec<Arm> {
        let mut arms = Vec::new();
        for i in 0..self.len() {
            let leaf = i != 0 && self.children[i].is_empty();
            if leaf {
                arms.push(Arm {
                    length: self.depth[i],
                    tip_degree: self.graph_degree[i],
                    tip_infected: true,
                });
            } else {
                for _ in 0..self.boundary[i] {
                    arms.push(Arm {
                        length: self.depth[i] + 1,
                        tip_degree: 2,
                        tip_infected: false,
                    });
                }
            }
        }
        arms
    }
}

/// Message-passing arms of `root` on a tree snapshot.
pub(crate) fn mp_arms(g: &Graph, snap: &RumorSnapshot, root: usize) -> Result<Vec<Arm>> {
    require_tree(g, snap)?;
    Ok(LocalTree::build(g, snap, root, None)?.arms())
}

/// How a rooted infected tree is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    /// Product of independent leaf probabilities; exact when the root is
    /// the center of a starlike tree, a lower bound otherwise.
    MessagePassing,
    /// Exact convolution on a shared Gauss–Legendre panel grid.
    Exact,
    /// Exact, by recursive adaptive quadrature of every parent-child
    /// convolution. Cost grows exponentially with tree height.
    NestedQuadrature,
}

fn nested(tree: &LocalTree, i: usize, horizon: f64, q: &QuadratureConfig) -> Result<f64> {
    let mut total = -(tree.boundary[i] as f64) * horizon;
    for &c in &tree.children[i] {
        let has_children = !tree.children[c].is_empty();
        let conv = try_integrate_log(
            |x| {
                let rest = horizon - x;
                if rest <= 0.0 {
                    return Ok(if has_children { f64::NEG_INFINITY } else { -x });
                }
                Ok(-x + nested(tree, c, rest, q)?)
            },
            0.0,
            horizon,
            q,
        )?;
        total += conv;
    }
    Ok(total)
}

impl Evaluator {
    pub(crate) fn evaluate(self, tree: &LocalTree, horizon: f64, q: &QuadratureConfig) -> Result<f64> {
        if horizon == 0.0 {
            return Ok(if tree.len() == 1 { 0.0 } else { f64::NEG_INFINITY });
        }
        match self {
            Evaluator::MessagePassing => Ok(arm_log_likelihood(&tree.arms(), horizon, q)?.value()),
            Evaluator::Exact => panel_tree_likelihood(tree, horizon, q),
            Evaluator::NestedQuadrature => nested(tree, 0, horizon, q),
        }
    }
}

/// Message-passing log-likelihood of `root` on a tree snapshot.
pub fn mp_likelihood(g: &Graph, snap: &RumorSnapshot, root: usize, q: &QuadratureConfig) -> Result<LogLikelihood> {
    tree_likelihood(g, snap, root, Evaluator::MessagePassing, q)
}

/// Exact log-likelihood of `root` on a tree snapshot of at most
/// [`EXACT_NODE_CAP`] infected nodes.
pub fn exact_tree_likelihood(
    g: &Graph,
    snap: &RumorSnapshot,
    root: usize,
    q: &QuadratureConfig,
) -> Result<LogLikelihood> {
    exact_tree_likelihood_capped(g, snap, root, q, EXACT_NODE_CAP)
}

pub fn exact_tree_likelihood_capped(
    g: &Graph,
    snap: &RumorSnapshot,
    root: usize,
    q: &QuadratureConfig,
    cap: usize,
) -> Result<LogLikelihood> {
    if snap.len() > cap {
        return Err(Error::CapExceeded { n: snap.len(), cap });
    }
    tree_likelihood(g, snap, root, Evaluator::Exact, q)
}

pub fn tree_likelihood(
    g: &Graph,
    snap: &RumorSnapshot,
    root: usize,
    evaluator: Evaluator,
    q: &QuadratureConfig,
) -> Result<LogLikelihood> {
    require_tree(g, snap)?;
    let tree = LocalTree::build(g, snap, root, None)?;
    Ok(LogLikelihood(evaluator.evaluate(&tree, snap.observed_time(), q)?))
}

/// Splits the tree snapshot at the bridge `(u, v)` and returns
/// `P(side of u | u, T) * integral_0^T exp(-x) P(side of v | v, T - x) dx`,
/// with both sides scored by `inner`. This is the likelihood of `u` when
/// the side of `v` is reached only through the bridge.
pub fn bridge_convolution(
    g: &Graph,
    snap: &RumorSnapshot,
    u: usize,
    v: usize,
    inner: Evaluator,
    q: &QuadratureConfig,
) -> Result<LogLikelihood> {
    if !snap.contains(u) || !snap.contains(v) || !g.has_edge(u, v) {
        return Err(Error::NotABridge(u, v));
    }
    if !snap.is_connected(g) {
        return Err(Error::NotConnected);
    }
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![u];
    seen[u] = true;
    while let Some(x) = stack.pop() {
        for &w in g.neighbors(x) {
            if snap.contains(w) && !seen[w] && !(x == u && w == v) {
                if w == v {
                    return Err(Error::NotABridge(u, v));
                }
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    let near = LocalTree::build(g, snap, u, Some(v))?;
    let far = LocalTree::build(g, snap, v, Some(u))?;
    let t = snap.observed_time();
    let first = inner.evaluate(&near, t, q)?;
    if t == 0.0 {
        return Ok(LogLikelihood::ZERO_PROBABILITY);
    }
    let conv = try_integrate_log(|x| Ok(-x + inner.evaluate(&far, t - x, q)?), 0.0, t, q)?;
    Ok(LogLikelihood(first + conv))
}
