//! Adaptive Gauss–Kronrod (7/15) quadrature on log-scale integrands.
//!
//! The integrand is supplied as its natural logarithm. Each panel is
//! evaluated as `exp(log f - m)` where `m` is the panel maximum, and panels
//! are combined with log-sum-exp, so integrals far below `f64::MIN_POSITIVE`
//! keep full relative precision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for [`integrate_log`].
///
/// `abs_tol` applies to the integrand rescaled to a unit peak, so it is
/// effectively relative to the largest integrand value seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-9,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod abscissae 1, 3, 5 and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_6,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    /// log of the panel maximum
    scale: f64,
    /// Kronrod estimate divided by exp(scale)
    value: f64,
    /// |Kronrod - Gauss| divided by exp(scale)
    error: f64,
}

impl Panel {
    fn log_error(&self) -> f64 {
        self.scale + self.error.ln()
    }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.log_error().total_cmp(&other.0.log_error())
    }
}

fn panel<F>(log_f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut logs = [0.0f64; 15];
    logs[7] = log_f(center)?;
    for j in 0..7 {
        logs[j] = log_f(center - half * XGK[j])?;
        logs[14 - j] = log_f(center + half * XGK[j])?;
    }
    if let Some(bad) = logs.iter().find(|l| l.is_nan() || **l == f64::INFINITY) {
        return Err(Error::Numerical {
            context: "quadrature",
            detail: format!("log-integrand returned {bad} on [{a}, {b}]"),
        });
    }
    let scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return Ok(Panel {
            a,
            b,
            scale,
            value: 0.0,
            error: 0.0,
        });
    }
    let w = |j: usize| (logs[j] - scale).exp();
    let mut kronrod = WGK[7] * w(7);
    let mut gauss = WG[3] * w(7);
    for j in 0..7 {
        let pair = w(j) + w(14 - j);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        a,
        b,
        scale,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Natural log of the integral of `exp(log_f)` over `[a, b]`.
pub fn integrate_log<F>(mut log_f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_log(|x| Ok(log_f(x)), a, b, cfg)
}

/// [`integrate_log`] for fallible integrands; the first error aborts.
pub fn try_integrate_log<F>(mut log_f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::invalid(format!("bad integration interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(f64::NEG_INFINITY);
    }
    let mut heap = BinaryHeap::new();
    heap.push(ByError(panel(&mut log_f, a, b)?));
    let mut splits = 0;
    loop {
        let peak = heap
            .iter()
            .map(|p| p.0.scale)
            .fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let (mut total, mut error) = (0.0, 0.0);
        for p in heap.iter() {
            let factor = (p.0.scale - peak).exp();
            total += p.0.value * factor;
            error += p.0.error * factor;
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * total) {
            return Ok(peak + total.ln());
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!(
                    "no convergence on [{a}, {b}] after {splits} subdivisions: \
                     log estimate {:.6e}, relative error estimate {:.3e}",
                    peak + total.ln(),
                    error / total
                ),
            });
        }
        let worst = heap.pop().expect("heap is never empty").0;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!("panel [{}, {}] cannot be bisected further", worst.a, worst.b),
            });
        }
        heap.push(ByError(panel(&mut log_f, worst.a, mid)?));
        heap.push(ByError(panel(&mut log_f, mid, worst.b)?));
        splits += 1;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
