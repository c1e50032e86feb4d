use std::fmt::Write as _;

use super::{bfs_tree, Graph};
use crate::error::{Error, Result};

/// A set of infected nodes observed at time `observed_time` (in units of
/// the mean edge delay). The infected set always induces a connected
/// subgraph of the graph it was validated against.
#[derive(Debug, Clone, PartialEq)]
pub struct RumorSnapshot {
    infected: Vec<usize>,
    mask: Vec<bool>,
    observed_time: f64,
}

impl RumorSnapshot {
    pub fn new<I>(g: &Graph, infected: I, observed_time: f64) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if !observed_time.is_finite() || observed_time < 0.0 {
            return Err(Error::InvalidSnapshot(format!(
                "observed time must be finite and non-negative, got {observed_time}"
            )));
        }
        let mut mask = vec![false; g.node_count()];
        let mut nodes = Vec::new();
        for v in infected {
            if v >= g.node_count() {
                return Err(Error::InvalidSnapshot(format!(
                    "node {v} is not in the graph ({} nodes)",
                    g.node_count()
                )));
            }
            if !mask[v] {
                mask[v] = true;
                nodes.push(v);
            }
        }
        if nodes.is_empty() {
            return Err(Error::InvalidSnapshot("infected set is empty".into()));
        }
        nodes.sort_unstable();
        let snap = RumorSnapshot {
            infected: nodes,
            mask,
            observed_time,
        };
        if !snap.is_connected(g) {
            return Err(Error::NotConnected);
        }
        Ok(snap)
    }

    /// Infected nodes in ascending order.
    pub fn infected(&self) -> &[usize] {
        &self.infected
    }

    pub fn len(&self) -> usize {
        self.infected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infected.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn observed_time(&self) -> f64 {
        self.observed_time
    }

    pub fn with_time(&self, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidSnapshot(format!(
                "observed time must be finite and non-negative, got {t}"
            )));
        }
        Ok(RumorSnapshot {
            observed_time: t,
            ..self.clone()
        })
    }

    /// Degree of `v` inside the infected subgraph.
    pub fn infected_degree(&self, g: &Graph, v: usize) -> usize {
        g.neighbors(v).iter().filter(|&&w| self.contains(w)).count()
    }

    /// Number of uninfected graph neighbors of `v`.
    pub fn uninfected_degree(&self, g: &Graph, v: usize) -> usize {
        g.degree(v) - self.infected_degree(g, v)
    }

    pub fn induced_edge_count(&self, g: &Graph) -> usize {
        self.infected
            .iter()
            .map(|&v| self.infected_degree(g, v))
            .sum::<usize>()
            / 2
    }

    /// True when the infected subgraph is a tree.
    pub fn is_tree(&self, g: &Graph) -> bool {
        self.induced_edge_count(g) + 1 == self.len()
    }

    pub(crate) fn is_connected(&self, g: &Graph) -> bool {
        if self.mask.len() != g.node_count() {
            return false;
        }
        let tree = bfs_tree(g, self.infected[0], |v| self.mask[v]);
        tree.order.len() == self.infected.len()
    }

    /// Applies a node permutation (old id -> new id); `g` is the relabeled graph.
    pub fn relabel(&self, g: &Graph, perm: &[usize]) -> Result<Self> {
        RumorSnapshot::new(
            g,
            self.infected.iter().map(|&v| perm[v]),
            self.observed_time,
        )
    }

    /// Infected-set file text: a `# t=<time>` header then one id per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# t={}", self.observed_time);
        for v in &self.infected {
            let _ = writeln!(out, "{v}");
        }
        out
    }
}

/// Parsed infected-set file, before validation against a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectedSet {
    pub nodes: Vec<usize>,
    pub time: Option<f64>,
}

impl InfectedSet {
    /// Validates against `g`. `time` overrides the file header when given.
    pub fn into_snapshot(self, g: &Graph, time: Option<f64>) -> Result<RumorSnapshot> {
        let t = time.or(self.time).ok_or_else(|| {
            Error::InvalidSnapshot("no observed time: add a `# t=<float>` header".into())
        })?;
        RumorSnapshot::new(g, self.nodes, t)
    }
}

pub fn parse_infected_set(text: &str) -> Result<InfectedSet> {
    let mut nodes = Vec::new();
    let mut time = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("t=") {
                let t: f64 = value.trim().parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("malformed time {value:?}"),
                })?;
                time = Some(t);
            }
            continue;
        }
        let token = line.split_whitespace().next().unwrap_or(line);
        nodes.push(token.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("malformed node id {token:?}"),
        })?);
    }
    Ok(InfectedSet { nodes, time })
}
