//! Closed-form likelihoods for regular trees, lines and symmetric stars.

use super::leaf::LogLikelihood;
use super::special::{ln_factorial, ln_lower_incomplete_gamma};
use crate::error::{Error, Result};
use crate::graph::SubtreeSizes;

fn positive_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("time must be positive and finite, got {t}")))
    }
}

/// `k * exp(-(N(d-2)+2)T) * (exp((d-2)T) - 1)^(N-1)` for an `N`-node
/// snapshot of a `d`-regular tree.
pub fn regular_tree_closed_form(n: usize, d: usize, k_const: f64, t: f64) -> Result<LogLikelihood> {
    positive_time(t)?;
    if d < 3 {
        return Err(Error::invalid("regular-tree closed form needs d >= 3; use line_likelihood"));
    }
    if n == 0 || !(k_const > 0.0) {
        return Err(Error::invalid("need n >= 1 and a positive constant"));
    }
    let r = (d - 2) as f64;
    let grow = (r * t).exp_m1().ln();
    Ok(LogLikelihood(
        k_const.ln() - (n as f64 * r + 2.0) * t + (n as f64 - 1.0) * grow,
    ))
}

/// Constant of the star center on a `d`-regular tree, `1/(d-2)^(N-1)`.
pub fn star_center_constant(n: usize, d: usize) -> Result<f64> {
    if d < 3 || n == 0 {
        return Err(Error::invalid("star constants need d >= 3 and n >= 1"));
    }
    Ok(((d - 2) as f64).powi(n as i32 - 1).recip())
}

/// Constant of a star leaf on a `d`-regular tree, `1/((N-1)(d-2)^(N-1))`.
pub fn star_arm_constant(n: usize, d: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("a star with an arm needs n >= 2"));
    }
    Ok(star_center_constant(n, d)? / (n - 1) as f64)
}

/// Constant for the end of an `s`-node path on a `d`-regular tree:
/// `k_1 = 1` and `k_{s+1} = k_s / ((d-2) s)`.
pub fn chain_constant(d: usize, s: usize) -> Result<f64> {
    if d < 3 || s == 0 {
        return Err(Error::invalid("chain constant needs d >= 3 and s >= 1"));
    }
    let r = (d - 2) as f64;
    Ok((1..s).fold(1.0, |k, i| k / (r * i as f64)))
}

/// Likelihood ratio `P(u) / P(v)` for adjacent `u`, `v` on a regular tree:
/// the size of the part containing `u` over the size of the part containing `v`.
pub fn regular_ratio(sizes: &SubtreeSizes, u: usize, v: usize, n: usize) -> Result<f64> {
    let toward_u = sizes
        .get(v, u)
        .ok_or_else(|| Error::invalid(format!("nodes {u} and {v} are not adjacent in the tree")))?;
    if toward_u >= n {
        return Err(Error::invalid(format!("subtree size {toward_u} does not fit n={n}")));
    }
    Ok(toward_u as f64 / (n - toward_u) as f64)
}

/// Source at position `i` (1-based) of an `n`-node infected segment of an
/// infinite line: `T^(i-1) e^{-T}/(i-1)! * T^(n-i) e^{-T}/(n-i)!`.
pub fn line_likelihood(n: usize, i: usize, t: f64) -> Result<LogLikelihood> {
    positive_time(t)?;
    if n == 0 || i == 0 || i > n {
        return Err(Error::invalid(format!("position {i} outside 1..={n}")));
    }
    let (left, right) = (i - 1, n - i);
    let lt = t.ln();
    Ok(LogLikelihood(
        left as f64 * lt + right as f64 * lt - 2.0 * t - ln_factorial(left) - ln_factorial(right),
    ))
}

/// Exact likelihood of a center-adjacent node on a symmetric starlike tree
/// with `d` arms of `k` infected nodes whose tips have degree 2.
pub fn star_arm_true_likelihood(d: usize, k: usize, t: f64) -> Result<LogLikelihood> {
    if d < 3 {
        return Err(Error::invalid("star arm formula needs d >= 3; use line_likelihood for d = 2"));
    }
    if k == 0 {
        return Err(Error::invalid("arm length must be positive"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(LogLikelihood::ZERO_PROBABILITY);
    }
    let (df, kf) = (d as f64, k as f64);
    let r = df - 2.0;
    let shape = kf * (df - 1.0) + 1.0;
    let value = kf.ln() + df * (-t - ln_factorial(k)) + t * r + (kf - 1.0) * t.ln()
        - shape * r.ln()
        + ln_lower_incomplete_gamma(shape, r * t)?;
    Ok(LogLikelihood(value))
}

/// Approximate center-to-arm likelihood ratio on a symmetric starlike tree:
/// `((k+1)/T)^(d-2) * (k+1)/k`.
pub fn starlike_ratio_approx(d: usize, k: usize, t: f64) -> Result<f64> {
    positive_time(t)?;
    if d < 2 || k == 0 {
        return Err(Error::invalid("need d >= 2 arms and arm length >= 1"));
    }
    let k1 = k as f64 + 1.0;
    Ok((k1 / t).powi(d as i32 - 2) * k1 / k as f64)
}

/// Likelihoods of the middle and of one end of a 3-node infected path
/// `x - y - z` whose nodes have graph degrees `dx`, `dy`, `dz`, as
/// `(P(y), P(z))`.
pub fn three_node_path(dx: usize, dy: usize, dz: usize, t: f64) -> Result<(LogLikelihood, LogLikelihood)> {
    positive_time(t)?;
    if dx < 3 || dy < 3 || dz < 3 {
        return Err(Error::invalid("three-node closed forms need all degrees >= 3"));
    }
    let (a, b, c) = (dx as f64, dy as f64, dz as f64);
    let middle = -(a + b + c - 4.0) * t + ((a - 2.0) * t).exp_m1().ln() + ((c - 2.0) * t).exp_m1().ln()
        - (a - 2.0).ln()
        - (c - 2.0).ln();
    // end z: e^{-dz T} [ (1 - e^{-(dy-2)T})/(dy-2) - (1 - e^{-(dx+dy-4)T})/(dx+dy-4) ] / (dx-2)
    let bracket = -(-(b - 2.0) * t).exp_m1() / (b - 2.0) + (-(a + b - 4.0) * t).exp_m1() / (a + b - 4.0);
    let end = -c * t + bracket.ln() - (a - 2.0).ln();
    Ok((LogLikelihood(middle), LogLikelihood(end)))
}
