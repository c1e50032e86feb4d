//! Starlike-tree approximation for general graphs and source detection.
//!
//! For a candidate root, the rumor closure is explored breadth-first with
//! the lowest-numbered neighbor first; pseudo-leaves are not expanded. Every
//! leaf of that search becomes an independent arm of the starlike tree
//! centered at the root, and the tree is scored by message passing.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{distance_center, jordan_center, rumor_centrality_bfs};
use crate::error::{Error, Result};
use crate::graph::{boundary, Graph, RumorSnapshot};
use crate::likelihood::{fill_leaf_table, mp_arms, sum_arms, Arm, LeafTable, LogLikelihood, QuadratureConfig};

/// Scores within this distance of the best score (log domain) are ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarlikeTree {
    pub center: usize,
    pub arms: Vec<Arm>,
}

pub fn build_starlike(g: &Graph, snap: &RumorSnapshot, root: usize) -> Result<StarlikeTree> {
    if !snap.contains(root) {
        return Err(Error::invalid(format!("root {root} is not infected")));
    }
    let view = boundary(g, snap)?;
    let n = g.node_count();
    let mut depth = vec![usize::MAX; n];
    let mut has_child = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    depth[root] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        if !snap.contains(v) {
            continue;
        }
        for &w in g.neighbors(v) {
            if view.in_closure(w) && depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                has_child[v] = true;
                queue.push_back(w);
            }
        }
    }
    let mut arms: Vec<Arm> = order
        .iter()
        .filter(|&&u| u != root && !has_child[u])
        .map(|&u| Arm {
            length: depth[u],
            tip_degree: g.degree(u),
            tip_infected: snap.contains(u),
        })
        .collect();
    for &w in g.neighbors(root) {
        if !view.in_closure(w) {
            arms.push(Arm {
                length: 1,
                tip_degree: g.degree(w),
                tip_infected: false,
            });
        }
    }
    arms.sort_unstable();
    Ok(StarlikeTree { center: root, arms })
}

pub fn starlike_likelihood(
    g: &Graph,
    snap: &RumorSnapshot,
    root: usize,
    q: &QuadratureConfig,
) -> Result<LogLikelihood> {
    let tree = build_starlike(g, snap, root)?;
    crate::likelihood::arm_log_likelihood(&tree.arms, snap.observed_time(), q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Starlike,
    MpTree,
    RcBfs,
    Jordan,
    Distance,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Starlike,
        Method::MpTree,
        Method::RcBfs,
        Method::Jordan,
        Method::Distance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Starlike => "starlike",
            Method::MpTree => "mp-tree",
            Method::RcBfs => "rc-bfs",
            Method::Jordan => "jordan",
            Method::Distance => "distance",
        }
    }

    /// True when scores depend on the observation time.
    pub fn uses_time(self) -> bool {
        matches!(self, Method::Starlike | Method::MpTree)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown method {s:?}; expected one of starlike, mp-tree, rc-bfs, jordan, distance"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedNode {
    pub node: usize,
    pub log_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionResult {
    pub method: Method,
    pub chosen: usize,
    pub tied: Vec<usize>,
    /// Best first; equal scores are ordered by node id.
    pub ranking: Vec<RankedNode>,
    pub seed: u64,
    /// Observation time used for scoring, or the time of the chosen node's
    /// peak in peak-reading mode.
    pub time: f64,
}

/// Arms for every candidate under a likelihood method.
fn candidate_arms(g: &Graph, snap: &RumorSnapshot, method: Method) -> Result<Vec<(usize, Vec<Arm>)>> {
    snap.infected()
        .par_iter()
        .map(|&v| {
            let arms = match method {
                Method::Starlike => build_starlike(g, snap, v)?.arms,
                _ => mp_arms(g, snap, v)?,
            };
            Ok((v, arms))
        })
        .collect()
}

fn leaf_table(all: &[(usize, Vec<Arm>)], t: f64, q: &QuadratureConfig) -> Result<LeafTable> {
    let mut distinct: Vec<Arm> = all.iter().flat_map(|(_, a)| a.iter().copied()).collect();
    distinct.sort_unstable();
    distinct.dedup_by_key(|a| a.leaf_key());
    let parts: Vec<LeafTable> = distinct
        .par_iter()
        .map(|arm| {
            let mut table = LeafTable::new();
            fill_leaf_table(&mut table, [arm], t, q)?;
            Ok(table)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn likelihood_scores(all: &[(usize, Vec<Arm>)], t: f64, q: &QuadratureConfig) -> Result<Vec<(usize, f64)>> {
    let table = leaf_table(all, t, q)?;
    Ok(all.iter().map(|(v, arms)| (*v, sum_arms(arms, t, &table).value())).collect())
}

/// Score of every infected node under `method`, in ascending node order.
pub fn score_candidates(
    g: &Graph,
    snap: &RumorSnapshot,
    method: Method,
    q: &QuadratureConfig,
) -> Result<Vec<(usize, f64)>> {
    let baseline = |s: crate::baselines::CentralityScores| s.score.into_iter().collect();
    match method {
        Method::Starlike | Method::MpTree => {
            let arms = candidate_arms(g, snap, method)?;
            likelihood_scores(&arms, snap.observed_time(), q)
        }
        Method::RcBfs => Ok(baseline(rumor_centrality_bfs(g, snap))),
        Method::Jordan => Ok(baseline(jordan_center(g, snap))),
        Method::Distance => Ok(baseline(distance_center(g, snap))),
    }
}

fn rank(method: Method, scores: Vec<(usize, f64)>, seed: u64, time: f64) -> DetectionResult {
    let mut ranking: Vec<RankedNode> = scores
        .into_iter()
        .map(|(node, log_score)| RankedNode { node, log_score })
        .collect();
    ranking.sort_by(|a, b| b.log_score.total_cmp(&a.log_score).then(a.node.cmp(&b.node)));
    let best = ranking[0].log_score;
    let mut tied: Vec<usize> = ranking
        .iter()
        .filter(|r| r.log_score == best || r.log_score >= best - TIE_TOLERANCE)
        .map(|r| r.node)
        .collect();
    tied.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = tied[rng.random_range(0..tied.len())];
    DetectionResult {
        method,
        chosen,
        tied,
        ranking,
        seed,
        time,
    }
}

/// Maximum-likelihood (or best-centrality) source estimate at the
/// snapshot's observation time. Ties are broken uniformly at random with a
/// generator seeded by `seed`.
pub fn detect_source(
    g: &Graph,
    snap: &RumorSnapshot,
    method: Method,
    q: &QuadratureConfig,
    seed: u64,
) -> Result<DetectionResult> {
    let scores = score_candidates(g, snap, method, q)?;
    Ok(rank(method, scores, seed, snap.observed_time()))
}

/// Evenly spaced observation times `start, start + step, ...` up to `stop`.
pub fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && step > 0.0 && stop >= start && stop.is_finite()) {
        return Err(Error::invalid(format!(
            "time grid needs 0 < start <= stop and step > 0, got {start}..{stop} by {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub node: usize,
    pub time: f64,
    pub log_likelihood: f64,
}

/// Log-likelihood of every infected node at every time in `times`.
pub fn likelihood_curves(
    g: &Graph,
    snap: &RumorSnapshot,
    method: Method,
    times: &[f64],
    q: &QuadratureConfig,
) -> Result<Vec<CurvePoint>> {
    if !method.uses_time() {
        return Err(Error::invalid(format!("method {method} does not depend on time")));
    }
    let arms = candidate_arms(g, snap, method)?;
    let per_time: Vec<Vec<(usize, f64)>> = times
        .par_iter()
        .map(|&t| likelihood_scores(&arms, t, q))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(times.len() * arms.len());
    for (&t, scores) in times.iter().zip(per_time) {
        for (node, log_likelihood) in scores {
            points.push(CurvePoint {
                node,
                time: t,
                log_likelihood,
            });
        }
    }
    points.sort_by(|a, b| a.node.cmp(&b.node).then(a.time.total_cmp(&b.time)));
    Ok(points)
}

/// Ranks candidates by the peak of their likelihood curve over `times`
/// rather than by the value at the observation time. Time-independent
/// methods fall back to [`detect_source`].
pub fn detect_source_peak(
    g: &Graph,
    snap: &RumorSnapshot,
    method: Method,
    times: &[f64],
    q: &QuadratureConfig,
    seed: u64,
) -> Result<DetectionResult> {
    if !method.uses_time() {
        return detect_source(g, snap, method, q, seed);
    }
    if times.is_empty() {
        return Err(Error::invalid("peak detection needs a non-empty time grid"));
    }
    let curves = likelihood_curves(g, snap, method, times, q)?;
    let mut peaks: Vec<(usize, f64, f64)> = Vec::new();
    for p in curves {
        match peaks.last_mut() {
            Some(last) if last.0 == p.node => {
                if p.log_likelihood > last.1 {
                    *last = (p.node, p.log_likelihood, p.time);
                }
            }
            _ => peaks.push((p.node, p.log_likelihood, p.time)),
        }
    }
    let mut result = rank(method, peaks.iter().map(|&(v, s, _)| (v, s)).collect(), seed, 0.0);
    result.time = peaks.iter().find(|p| p.0 == result.chosen).map(|p| p.2).unwrap_or(0.0);
    Ok(result)
}
