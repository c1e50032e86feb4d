use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate_log, QuadratureConfig};
use crate::error::{Error, Result};

/// A likelihood in the natural-log domain; `-inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogLikelihood(pub f64);

impl LogLikelihood {
    pub const ZERO_PROBABILITY: LogLikelihood = LogLikelihood(f64::NEG_INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn probability(self) -> f64 {
        self.0.exp()
    }
}

impl fmt::Display for LogLikelihood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A leaf `K` hops from the candidate source whose graph degree is `d`,
/// observed at time `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafProbTerm {
    pub hops: usize,
    pub degree: usize,
    pub horizon: f64,
}

impl LeafProbTerm {
    pub fn new(hops: usize, degree: usize, horizon: f64) -> Result<Self> {
        let term = LeafProbTerm {
            hops,
            degree,
            horizon,
        };
        term.validate()?;
        Ok(term)
    }

    fn validate(&self) -> Result<()> {
        if self.hops == 0 || self.degree == 0 {
            return Err(Error::invalid(format!(
                "leaf term needs hops >= 1 and degree >= 1, got K={} d={}",
                self.hops, self.degree
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::invalid(format!(
                "leaf term needs a positive finite horizon, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Probability that the leaf has been reached by time `T` while none of its
/// `d - 1` outward edges has fired yet:
/// the integral over `t` in `[0, T]` of `Erlang_K(t) * exp(-(T - t)(d - 1))`.
pub fn leaf_probability(term: LeafProbTerm, q: &QuadratureConfig) -> Result<LogLikelihood> {
    term.validate()?;
    let LeafProbTerm {
        hops,
        degree,
        horizon,
    } = term;
    let k = hops as f64;
    let escape = degree as f64 - 1.0;
    let norm = ln_gamma(k);
    let log_f = |t: f64| {
        let power = if hops == 1 { 0.0 } else { (k - 1.0) * t.ln() };
        power - t - norm - (horizon - t) * escape
    };
    let value = integrate_log(log_f, 0.0, horizon, q)?;
    if !value.is_finite() {
        return Err(Error::Numerical {
            context: "leaf probability",
            detail: format!("K={hops} d={degree} T={horizon} gave log value {value}"),
        });
    }
    Ok(LogLikelihood(value))
}
