use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Log density of the Erlang distribution with unit rate.
pub fn erlang_log_pdf(shape: usize, t: f64) -> f64 {
    assert!(shape >= 1, "Erlang shape must be positive");
    if t == 0.0 {
        return if shape == 1 { 0.0 } else { f64::NEG_INFINITY };
    }
    (shape as f64 - 1.0) * t.ln() - t - ln_gamma(shape as f64)
}

pub fn ln_factorial(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

fn check(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) || !(x >= 0.0) {
        return Err(Error::invalid(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    Ok(())
}

/// Series sum with `gamma(a, x) = x^a e^{-x} * series / a`.
fn series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Modified Lentz continued fraction with `Gamma(a, x) = x^a e^{-x} * cf`.
fn continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Natural log of the lower incomplete gamma function.
pub fn ln_lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    check(a, x)?;
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let prefix = a * x.ln() - x;
    if x < a + 1.0 {
        Ok(prefix + series(a, x).ln())
    } else {
        let lg = ln_gamma(a);
        let upper_regularized = (prefix - lg).exp() * continued_fraction(a, x);
        Ok(lg + (-upper_regularized).ln_1p())
    }
}

/// Lower incomplete gamma `gamma(a, x)`, the integral of `t^{a-1} e^{-t}` over `[0, x]`.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    ln_lower_incomplete_gamma(a, x).map(f64::exp)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    Ok((ln_lower_incomplete_gamma(a, x)? - ln_gamma(a)).exp())
}
