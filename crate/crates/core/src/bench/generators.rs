use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Graph};

/// Erdős–Rényi graph: each of the `n(n-1)/2` pairs is an edge with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Uniformly random labeled tree, decoded from a random Prüfer sequence.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("a tree needs at least one node"));
    }
    if n <= 2 {
        return Graph::from_edges(n, (n == 2).then_some((0, 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    Graph::from_edges(n, prufer_decode(n, &code))
}

pub(crate) fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut remaining = vec![1usize; n];
    for &c in code {
        remaining[c] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| remaining[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let Reverse(leaf) = leaves.pop().expect("a Prüfer step always has a leaf");
        edges.push((leaf, c));
        remaining[c] -= 1;
        if remaining[c] == 1 {
            leaves.push(Reverse(c));
        }
    }
    let Reverse(a) = leaves.pop().expect("two nodes remain");
    let Reverse(b) = leaves.pop().expect("two nodes remain");
    edges.push((a, b));
    edges
}

pub fn line(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

/// Center 0 with `arms` paths of `arm_len` nodes; node `j` (1-based) of arm
/// `a` (0-based) has id `1 + a * arm_len + (j - 1)`.
pub fn star(arms: usize, arm_len: usize) -> Result<Graph> {
    let n = 1 + arms * arm_len;
    let mut edges = Vec::with_capacity(n - 1);
    for a in 0..arms {
        let first = 1 + a * arm_len;
        if arm_len > 0 {
            edges.push((0, first));
        }
        for j in 1..arm_len {
            edges.push((first + j - 1, first + j));
        }
    }
    Graph::from_edges(n, edges)
}

/// `w` by `h` grid; node `(x, y)` has id `y * w + x`.
pub fn grid(w: usize, h: usize) -> Result<Graph> {
    let id = |x: usize, y: usize| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    Graph::from_edges(w * h, edges)
}

/// Ball of the given radius around node 0 in the infinite `d`-regular tree.
/// Nodes at the rim have degree 1.
pub fn regular_tree_ball(d: usize, radius: usize) -> Result<Graph> {
    if d < 2 {
        return Err(Error::invalid("regular tree needs d >= 2"));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for level in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let kids = if level == 0 { d } else { d - 1 };
            for _ in 0..kids {
                edges.push((v, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    Graph::from_edges(next_id, edges)
}

/// A graph source for experiments, written as `kind:arg:arg`, for example
/// `er:50:0.04`, `random-tree:100`, `line:9`, `star:3:2`, `grid:5:5` or
/// `file:path/to/edges.txt`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Er { n: usize, p: f64 },
    RandomTree { n: usize },
    Line { n: usize },
    Star { arms: usize, arm_len: usize },
    Grid { w: usize, h: usize },
    File { path: PathBuf },
}

impl GeneratorSpec {
    /// True when every call with a new seed gives a new graph.
    pub fn is_random(&self) -> bool {
        matches!(self, GeneratorSpec::Er { .. } | GeneratorSpec::RandomTree { .. })
    }

    /// True when the generated graph is always a tree.
    pub fn is_tree(&self) -> bool {
        matches!(
            self,
            GeneratorSpec::RandomTree { .. } | GeneratorSpec::Line { .. } | GeneratorSpec::Star { .. }
        )
    }

    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match self {
            GeneratorSpec::Er { n, p } => gen_er(*n, *p, seed),
            GeneratorSpec::RandomTree { n } => gen_random_tree(*n, seed),
            GeneratorSpec::Line { n } => line(*n),
            GeneratorSpec::Star { arms, arm_len } => star(*arms, *arm_len),
            GeneratorSpec::Grid { w, h } => grid(*w, *h),
            GeneratorSpec::File { path } => load_edge_list(std::fs::File::open(path)?),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Er { n, p } => write!(f, "er:{n}:{p}"),
            GeneratorSpec::RandomTree { n } => write!(f, "random-tree:{n}"),
            GeneratorSpec::Line { n } => write!(f, "line:{n}"),
            GeneratorSpec::Star { arms, arm_len } => write!(f, "star:{arms}:{arm_len}"),
            GeneratorSpec::Grid { w, h } => write!(f, "grid:{w}:{h}"),
            GeneratorSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed generator {s:?}"));
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(GeneratorSpec::File { path: path.into() });
        }
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let spec = match (parts[0], parts.len()) {
            ("er", 3) => GeneratorSpec::Er {
                n: int(1)?,
                p: parts[2].parse().map_err(|_| bad())?,
            },
            ("random-tree", 2) => GeneratorSpec::RandomTree { n: int(1)? },
            ("line", 2) => GeneratorSpec::Line { n: int(1)? },
            ("star", 3) => GeneratorSpec::Star {
                arms: int(1)?,
                arm_len: int(2)?,
            },
            ("grid", 3) => GeneratorSpec::Grid { w: int(1)?, h: int(2)? },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(10, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_er(10, 1.0, 1).unwrap().edge_count(), 45);
        assert!(gen_er(10, 1.5, 1).is_err());
    }

    #[test]
    fn er_mean_edge_count() {
        let seeds = 10_000u64;
        let counts: Vec<f64> = (0..seeds).map(|s| gen_er(50, 0.04, s).unwrap().edge_count() as f64).collect();
        let mean = counts.iter().sum::<f64>() / seeds as f64;
        let sd = (1225.0 * 0.04 * 0.96 / seeds as f64).sqrt();
        assert!((mean - 49.0).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn random_trees_are_uniform_trees() {
        assert_eq!(gen_random_tree(1, 0).unwrap().node_count(), 1);
        assert_eq!(gen_random_tree(2, 0).unwrap().edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let draws = 30_000u64;
        let mut freq: BTreeMap<Vec<(usize, usize)>, u64> = BTreeMap::new();
        for s in 0..draws {
            *freq.entry(gen_random_tree(3, s).unwrap().edges().collect()).or_default() += 1;
        }
        assert_eq!(freq.len(), 3);
        let sd = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in freq.values() {
            assert!((c as f64 - draws as f64 / 3.0).abs() < 3.0 * sd);
        }
        for s in 0..50 {
            let g = gen_random_tree(40, s).unwrap();
            assert_eq!(g.edge_count(), 39);
            assert!(g.is_forest());
        }
    }

    #[test]
    fn prufer_known_code() {
        let mut e = prufer_decode(6, &[3, 3, 3, 4]);
        e.iter_mut().for_each(|p| *p = (p.0.min(p.1), p.0.max(p.1)));
        e.sort();
        assert_eq!(e, vec![(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn deterministic_shapes() {
        let s = star(3, 2).unwrap();
        assert_eq!(s.neighbors(0), &[1, 3, 5]);
        assert_eq!(s.neighbors(3), &[0, 4]);
        assert_eq!(grid(3, 2).unwrap().edge_count(), 7);
        let b = regular_tree_ball(3, 2).unwrap();
        assert_eq!((b.node_count(), b.degree(0), b.degree(1), b.degree(4)), (10, 3, 3, 1));
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["er:50:0.04", "random-tree:100", "line:9", "star:3:2", "grid:5:4", "file:/tmp/x.txt"] {
            assert_eq!(s.parse::<GeneratorSpec>().unwrap().to_string(), s);
        }
        for s in ["er:50", "ring:4", "line:x", ""] {
            assert!(s.parse::<GeneratorSpec>().is_err(), "{s}");
        }
    }
}
