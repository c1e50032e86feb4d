use std::collections::HashMap;

use serde::Serialize;

use super::leaf::{leaf_probability, LeafProbTerm, LogLikelihood};
use super::quadrature::QuadratureConfig;
use crate::error::Result;

/// A path hanging from the candidate source. `length` counts hops from the
/// source to the tip. An infected tip contributes the leaf probability of a
/// node `length` hops away with its own degree; an uninfected tip stands for
/// one boundary edge of the last infected node on the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Arm {
    pub length: usize,
    pub tip_degree: usize,
    pub tip_infected: bool,
}

impl Arm {
    /// `(hops, degree)` of the leaf term, or `None` for a boundary edge of
    /// the source itself, which contributes `exp(-T)`.
    pub(crate) fn leaf_key(&self) -> Option<(usize, usize)> {
        if self.tip_infected {
            Some((self.length, self.tip_degree))
        } else if self.length >= 2 {
            Some((self.length - 1, 2))
        } else {
            None
        }
    }
}

pub(crate) type LeafTable = HashMap<(usize, usize), f64>;

pub(crate) fn fill_leaf_table<'a, I>(table: &mut LeafTable, arms: I, t: f64, q: &QuadratureConfig) -> Result<()>
where
    I: IntoIterator<Item = &'a Arm>,
{
    if t == 0.0 {
        return Ok(());
    }
    for arm in arms {
        if let Some(key) = arm.leaf_key() {
            if !table.contains_key(&key) {
                let v = leaf_probability(LeafProbTerm::new(key.0, key.1, t)?, q)?.value();
                table.insert(key, v);
            }
        }
    }
    Ok(())
}

/// Sums arm terms in canonical (sorted) order so equal arm multisets give
/// bit-identical scores.
pub(crate) fn sum_arms(arms: &[Arm], t: f64, table: &LeafTable) -> LogLikelihood {
    let mut sorted = arms.to_vec();
    sorted.sort_unstable();
    if t == 0.0 {
        let reachable = sorted.iter().all(|a| a.leaf_key().is_none());
        return LogLikelihood(if reachable { 0.0 } else { f64::NEG_INFINITY });
    }
    let total = sorted
        .iter()
        .map(|a| match a.leaf_key() {
            Some(key) => table[&key],
            None => -t,
        })
        .sum();
    LogLikelihood(total)
}

/// Log-likelihood of a set of independent arms glued at the source.
pub fn arm_log_likelihood(arms: &[Arm], t: f64, q: &QuadratureConfig) -> Result<LogLikelihood> {
    let mut table = LeafTable::new();
    fill_leaf_table(&mut table, arms, t, q)?;
    Ok(sum_arms(arms, t, &table))
}
