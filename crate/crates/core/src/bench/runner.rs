use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentConfig, GeneratorSpec, Mode};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, connected_component, Graph};
use crate::sim::{derive_seed, spread_until_n, spread_until_t, SpreadConfig};
use crate::starlike::{detect_source, Method};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEstimate {
    pub method: Method,
    pub estimate: usize,
    pub hop_error: usize,
    pub tie_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub generator: String,
    /// Infection ratio (fixed-N) or horizon (fixed-T).
    pub setting: f64,
    pub trial_index: usize,
    pub seed: u64,
    pub true_source: usize,
    pub n_infected: usize,
    pub n_edges_infected: usize,
    pub elapsed_time: f64,
    /// Sources (and, for random generators, graphs) redrawn because the
    /// source component was too small.
    pub resamples: usize,
    pub estimates: Vec<MethodEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub generator: String,
    pub n: usize,
    #[serde(rename = "p_or_ratio_or_T")]
    pub setting: f64,
    pub method: Method,
    pub accuracy: f64,
    pub mean_hop_error: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
}

impl ExperimentReport {
    pub fn total_resamples(&self) -> usize {
        self.records.iter().map(|r| r.resamples).sum()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.aggregates {
            w.serialize(row).map_err(|e| Error::invalid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    shared: Option<&Graph>,
    setting: f64,
    index: usize,
    seed: u64,
) -> Result<TrialRecord> {
    let mut owned = match shared {
        Some(_) => None,
        None => Some(cfg.generator.generate(derive_seed(seed, 0))?),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let sim = SpreadConfig::with_seed(derive_seed(seed, 2));
    let mut resamples = 0;
    let (source, snap, elapsed) = loop {
        let g = shared.or(owned.as_ref()).expect("graph is either shared or owned");
        if g.node_count() == 0 {
            return Err(Error::invalid("generated graph has no nodes"));
        }
        let source = rng.random_range(0..g.node_count());
        match cfg.mode {
            Mode::FixedN(_) => {
                let target = ((setting * g.node_count() as f64).round() as usize).max(1);
                if connected_component(g, source).len() < target {
                    resamples += 1;
                    if resamples > cfg.max_resamples {
                        return Err(Error::invalid(format!(
                            "trial {index}: no source with a component of {target} nodes after {resamples} draws"
                        )));
                    }
                    if owned.is_some() {
                        owned = Some(cfg.generator.generate(derive_seed(seed, 1000 + resamples as u64))?);
                    }
                    continue;
                }
                let (snap, out) = spread_until_n(g, source, target, &sim)?;
                break (source, snap, out.elapsed);
            }
            Mode::FixedT(_) => {
                let snap = spread_until_t(g, source, setting, &sim)?;
                break (source, snap, setting);
            }
        }
    };
    let g = shared.or(owned.as_ref()).expect("graph is either shared or owned");
    let from_source = bfs_distances(g, source, None);
    let estimates = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let r = detect_source(g, &snap, method, &cfg.quadrature, derive_seed(seed, 100 + m as u64))?;
            Ok(MethodEstimate {
                method,
                estimate: r.chosen,
                hop_error: from_source[&r.chosen],
                tie_count: r.tied.len(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(TrialRecord {
        generator: cfg.generator.to_string(),
        setting,
        trial_index: index,
        seed,
        true_source: source,
        n_infected: snap.len(),
        n_edges_infected: snap.induced_edge_count(g),
        elapsed_time: elapsed,
        resamples,
        estimates,
    })
}

/// Runs every trial of every setting. Trials run in parallel; each draws
/// from its own seed derived from the master seed, so the report does not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let shared = if cfg.generator.is_random() {
        None
    } else {
        Some(cfg.generator.generate(cfg.master_seed)?)
    };
    if let Some(g) = &shared {
        let tree_only = cfg.methods.contains(&Method::MpTree);
        if tree_only && matches!(cfg.generator, GeneratorSpec::File { .. }) && !g.is_forest() {
            return Err(Error::invalid("mp-tree needs a tree; the input graph has cycles"));
        }
    }
    let mut records = Vec::new();
    for (s, &setting) in cfg.mode.settings().iter().enumerate() {
        let setting_seed = derive_seed(cfg.master_seed, s as u64);
        let batch: Vec<TrialRecord> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, shared.as_ref(), setting, i, derive_seed(setting_seed, i as u64)))
            .collect::<Result<_>>()?;
        records.extend(batch);
    }
    let n = match (&shared, &cfg.generator) {
        (Some(g), _) => g.node_count(),
        (None, GeneratorSpec::Er { n, .. } | GeneratorSpec::RandomTree { n }) => *n,
        (None, _) => 0,
    };
    let aggregates = aggregate(cfg, n, &records);
    Ok(ExperimentReport { records, aggregates })
}

fn aggregate(cfg: &ExperimentConfig, n: usize, records: &[TrialRecord]) -> Vec<AggregateRow> {
    let mut sums: BTreeMap<(usize, usize), (usize, usize, usize)> = BTreeMap::new();
    let settings = cfg.mode.settings();
    for r in records {
        let s = settings.iter().position(|&x| x == r.setting).expect("record setting is configured");
        for (m, e) in r.estimates.iter().enumerate() {
            let entry = sums.entry((s, m)).or_default();
            entry.0 += usize::from(e.hop_error == 0);
            entry.1 += e.hop_error;
            entry.2 += 1;
        }
    }
    sums.into_iter()
        .map(|((s, m), (hits, hops, trials))| AggregateRow {
            generator: cfg.generator.to_string(),
            n,
            setting: settings[s],
            method: cfg.methods[m],
            accuracy: hits as f64 / trials as f64,
            mean_hop_error: hops as f64 / trials as f64,
            trials,
        })
        .collect()
}
