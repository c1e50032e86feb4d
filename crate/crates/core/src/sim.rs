//! Event-driven SI spreading with independent exponential edge delays.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{connected_component, Graph, RumorSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    /// Infection rate of every edge; delays are Exp(rate).
    pub rate: f64,
    pub seed: u64,
}

impl SpreadConfig {
    pub fn with_seed(seed: u64) -> Self {
        SpreadConfig { rate: 1.0, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.rate.is_finite() && self.rate > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!("spreading rate must be positive, got {}", self.rate)))
        }
    }
}

impl Default for SpreadConfig {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadOutcome {
    pub source: usize,
    pub infection_time: BTreeMap<usize, f64>,
    /// The neighbor whose edge fired first, for every node but the source.
    pub infected_by: BTreeMap<usize, usize>,
    pub elapsed: f64,
}

impl SpreadOutcome {
    /// `node_id infection_time` lines in infection order.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(usize, f64)> = self.infection_time.iter().map(|(&v, &t)| (v, t)).collect();
        rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut out = String::new();
        for (v, t) in rows {
            let _ = writeln!(out, "{v} {t}");
        }
        out
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index` of a run with seed `master`, independent of the
/// order trials are executed in.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    target: usize,
    from: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // reversed so that BinaryHeap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.target.cmp(&self.target))
            .then(other.from.cmp(&self.from))
    }
}

enum Stop<'a> {
    Count(usize),
    Time(f64),
    /// Stop at the horizon, or as soon as a node outside the mask is infected.
    Match(f64, &'a RumorSnapshot),
}

struct Run {
    order: Vec<(usize, f64, Option<usize>)>,
    elapsed: f64,
    escaped: bool,
}

fn run(g: &Graph, source: usize, cfg: &SpreadConfig, stop: Stop<'_>) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut infected = vec![false; g.node_count()];
    let mut heap = BinaryHeap::new();
    let mut order = Vec::new();
    let mut infect = |v: usize, time: f64, from: Option<usize>, infected: &mut Vec<bool>, heap: &mut BinaryHeap<Event>| {
        infected[v] = true;
        order.push((v, time, from));
        for &w in g.neighbors(v) {
            if !infected[w] {
                let delay: f64 = rng.sample::<f64, _>(Exp1) / cfg.rate;
                heap.push(Event {
                    time: time + delay,
                    target: w,
                    from: v,
                });
            }
        }
    };
    infect(source, 0.0, None, &mut infected, &mut heap);
    let mut count = 1;
    let mut escaped = false;
    let mut elapsed = 0.0;
    if let Stop::Count(1) = stop {
        return Run {
            order,
            elapsed,
            escaped,
        };
    }
    while let Some(ev) = heap.pop() {
        if infected[ev.target] {
            continue;
        }
        match stop {
            Stop::Time(t) | Stop::Match(t, _) if ev.time > t => break,
            Stop::Match(_, snap) if !snap.contains(ev.target) => {
                escaped = true;
                break;
            }
            _ => {}
        }
        infect(ev.target, ev.time, Some(ev.from), &mut infected, &mut heap);
        count += 1;
        if let Stop::Count(n) = stop {
            if count == n {
                elapsed = ev.time;
                break;
            }
        }
    }
    if let Stop::Time(t) | Stop::Match(t, _) = stop {
        elapsed = t;
    }
    Run {
        order,
        elapsed,
        escaped,
    }
}

fn outcome(source: usize, r: &Run) -> SpreadOutcome {
    SpreadOutcome {
        source,
        infection_time: r.order.iter().map(|&(v, t, _)| (v, t)).collect(),
        infected_by: r.order.iter().filter_map(|&(v, _, f)| f.map(|f| (v, f))).collect(),
        elapsed: r.elapsed,
    }
}

fn check_source(g: &Graph, source: usize) -> Result<()> {
    if source < g.node_count() {
        Ok(())
    } else {
        Err(Error::invalid(format!("source {source} is not in the graph")))
    }
}

/// Spreads from `source` until exactly `n` nodes are infected. The snapshot
/// is observed at the time of the `n`-th infection.
pub fn spread_until_n(
    g: &Graph,
    source: usize,
    n: usize,
    cfg: &SpreadConfig,
) -> Result<(RumorSnapshot, SpreadOutcome)> {
    cfg.validate()?;
    check_source(g, source)?;
    if n == 0 {
        return Err(Error::invalid("target infection count must be positive"));
    }
    let component = connected_component(g, source).len();
    if n > component {
        return Err(Error::invalid(format!(
            "cannot infect {n} nodes: the component of source {source} has {component}"
        )));
    }
    let r = run(g, source, cfg, Stop::Count(n));
    let out = outcome(source, &r);
    let snap = RumorSnapshot::new(g, out.infection_time.keys().copied(), r.elapsed)?;
    Ok((snap, out))
}

/// Spreads from `source` for `t` time units.
pub fn spread_until_t(g: &Graph, source: usize, t: f64, cfg: &SpreadConfig) -> Result<RumorSnapshot> {
    spread_until_t_with_outcome(g, source, t, cfg).map(|(s, _)| s)
}

pub fn spread_until_t_with_outcome(
    g: &Graph,
    source: usize,
    t: f64,
    cfg: &SpreadConfig,
) -> Result<(RumorSnapshot, SpreadOutcome)> {
    cfg.validate()?;
    check_source(g, source)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("horizon must be finite and non-negative, got {t}")));
    }
    let r = run(g, source, cfg, Stop::Time(t));
    let out = outcome(source, &r);
    let snap = RumorSnapshot::new(g, out.infection_time.keys().copied(), t)?;
    Ok((snap, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Fraction of independent spreads from `candidate`, run for the snapshot's
/// observed time, that infect exactly the snapshot's node set.
pub fn monte_carlo_likelihood(
    g: &Graph,
    snap: &RumorSnapshot,
    candidate: usize,
    samples: usize,
    cfg: &SpreadConfig,
) -> Result<MonteCarloEstimate> {
    cfg.validate()?;
    if !snap.contains(candidate) {
        return Err(Error::invalid(format!("candidate {candidate} is not infected")));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let t = snap.observed_time();
    let hits: usize = (0..samples as u64)
        .into_par_iter()
        .filter(|&i| {
            let trial = SpreadConfig {
                rate: cfg.rate,
                seed: derive_seed(cfg.seed, i),
            };
            let r = run(g, candidate, &trial, Stop::Match(t, snap));
            !r.escaped && r.order.len() == snap.len()
        })
        .count();
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn single_infection_is_immediate() {
        let g = path(3);
        let (s, o) = spread_until_n(&g, 1, 1, &SpreadConfig::with_seed(3)).unwrap();
        assert_eq!(s.infected(), &[1]);
        assert_eq!(o.elapsed, 0.0);
        assert!(spread_until_n(&g, 1, 4, &SpreadConfig::default()).is_err());
        assert!(spread_until_n(&g, 1, 0, &SpreadConfig::default()).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
        let cfg = SpreadConfig::with_seed(99);
        let a = spread_until_n(&g, 0, 5, &cfg).unwrap();
        let b = spread_until_n(&g, 0, 5, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.to_text(), b.1.to_text());
        let c = spread_until_n(&g, 0, 5, &SpreadConfig::with_seed(100)).unwrap();
        assert_ne!(a.1.elapsed, c.1.elapsed);
    }

    #[test]
    fn max_of_two_exponentials() {
        let g = path(3);
        let trials = 100_000u64;
        let total: f64 = (0..trials)
            .into_par_iter()
            .map(|i| spread_until_n(&g, 1, 3, &SpreadConfig::with_seed(derive_seed(7, i))).unwrap().1.elapsed)
            .sum();
        let mean = total / trials as f64;
        assert!((mean - 1.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn horizon_edge_cases() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        for seed in 0..20 {
            let s = spread_until_t(&g, 0, 50.0, &SpreadConfig::with_seed(seed)).unwrap();
            assert_eq!(s.infected(), &[0]);
            let s = spread_until_t(&g, 1, 1e-12, &SpreadConfig::with_seed(seed)).unwrap();
            assert_eq!(s.infected(), &[1]);
        }
        assert!(spread_until_t(&g, 0, -1.0, &SpreadConfig::default()).is_err());
        assert!(spread_until_t(&g, 5, 1.0, &SpreadConfig::default()).is_err());
    }

    #[test]
    fn whole_line_segment_at_unit_time() {
        // nodes 0,1,2 infected by t=1 and node 3 not: T^2 e^{-T} / 2
        let g = path(5);
        let trials = 1_000_000u64;
        let hits = (0..trials)
            .into_par_iter()
            .filter(|&i| {
                let s = spread_until_t(&g, 0, 1.0, &SpreadConfig::with_seed(derive_seed(11, i))).unwrap();
                s.infected() == [0, 1, 2]
            })
            .count();
        let p = hits as f64 / trials as f64;
        assert!((p - 0.5 * (-1.0f64).exp()).abs() < 0.0012, "p={p}");
    }

    #[test]
    fn monte_carlo_matches_closed_forms() {
        let g = path(4);
        let s = RumorSnapshot::new(&g, 0..3, 1.0).unwrap();
        let mc = monte_carlo_likelihood(&g, &s, 0, 200_000, &SpreadConfig::with_seed(5)).unwrap();
        let expect = 0.5 * (-1.0f64).exp();
        assert!((mc.estimate - expect).abs() < 4.0 * mc.std_error);

        let s = RumorSnapshot::new(&g, [2], 1e-6).unwrap();
        let mc = monte_carlo_likelihood(&g, &s, 2, 1000, &SpreadConfig::with_seed(5)).unwrap();
        assert!(mc.estimate > 0.99);
        assert!(monte_carlo_likelihood(&g, &s, 1, 10, &SpreadConfig::default()).is_err());
    }

    #[test]
    fn rate_scales_time() {
        let g = Graph::from_edges(
            15,
            (1..15).map(|v| ((v - 1) / 2, v)).chain([(3, 4), (9, 12)]),
        )
        .unwrap();
        let sizes = |rate: f64, t: f64| {
            let mut v: Vec<usize> = (0..4000u64)
                .map(|i| {
                    let cfg = SpreadConfig {
                        rate,
                        seed: derive_seed(21, i),
                    };
                    spread_until_t(&g, 0, t, &cfg).unwrap().len()
                })
                .collect();
            v.sort_unstable();
            v
        };
        // Matched seeds draw the same Exp(1) variates, so the infected sets
        // coincide exactly, not only in distribution.
        assert_eq!(sizes(2.5, 0.8), sizes(1.0, 2.0));
        let slow = sizes(0.5, 1.0);
        let fast = sizes(1.0, 1.0);
        assert!(slow.iter().sum::<usize>() < fast.iter().sum::<usize>());
    }

    proptest! {
        #[test]
        fn outcomes_are_causal_and_connected(n in 2usize..25, extra in 0usize..20, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            for _ in 0..extra {
                let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
                if u != v { edges.push((u, v)); }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let target = 1 + (seed as usize % n);
            let source = (seed >> 32) as usize % n;
            let (snap, out) = spread_until_n(&g, source, target, &SpreadConfig::with_seed(seed)).unwrap();
            prop_assert_eq!(snap.len(), target);
            prop_assert!(snap.contains(source));
            prop_assert_eq!(out.infection_time[&source], 0.0);
            for (&v, &from) in &out.infected_by {
                prop_assert!(g.has_edge(v, from));
                prop_assert!(out.infection_time[&from] < out.infection_time[&v]);
            }
            prop_assert!(out.infection_time.values().all(|&t| t <= out.elapsed));

            let (snap, out) = spread_until_t_with_outcome(&g, source, 0.7, &SpreadConfig::with_seed(seed)).unwrap();
            prop_assert!(snap.contains(source));
            prop_assert!(out.infection_time.values().all(|&t| t <= 0.7));
        }
    }
}
