//! Exact tree likelihood by bottom-up convolution on a composite
//! Gauss–Legendre grid.
//!
//! With `F(u, s)` the probability that the subtree of `u` is observed
//! exactly at age `s` of `u`, and `G(c, s) = int_0^s exp(-(s - r)) F(c, r) dr`,
//! the recursion is `F(u, s) = exp(-b_u s) * prod_c G(c, s)`. Every `F` is
//! sampled on one panel grid and each convolution is integrated against the
//! Lagrange interpolant of `F` on each panel, so one tree costs
//! `O(N * panels * n^2)`.

use super::quadrature::{gauss_legendre, QuadratureConfig};
use super::tree::LocalTree;
use crate::error::{Error, Result};

const NODES: usize = 16;
const MAX_REFINEMENTS: usize = 6;

struct Kernel {
    x: Vec<f64>,
    half: f64,
    /// weights for the full-panel step, `G(a + h) = e^{-h} G(a) + sum end_w F`
    end_w: Vec<f64>,
    /// `exp(-half (x_i + 1))`
    decay: Vec<f64>,
    /// partial-panel product integration weights
    inner: Vec<Vec<f64>>,
}

fn lagrange(x: &[f64], j: usize, y: f64) -> f64 {
    x.iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &xk)| (y - xk) / (x[j] - xk))
        .product()
}

impl Kernel {
    fn new(h: f64) -> Self {
        let (x, w) = gauss_legendre(NODES);
        let (z, wz) = gauss_legendre(2 * NODES);
        let half = 0.5 * h;
        let end_w = (0..NODES)
            .map(|j| half * w[j] * (-half * (1.0 - x[j])).exp())
            .collect();
        let decay = x.iter().map(|&xi| (-half * (xi + 1.0)).exp()).collect();
        let inner = x
            .iter()
            .map(|&xi| {
                let span = 0.5 * (xi + 1.0);
                (0..NODES)
                    .map(|j| {
                        let mut acc = 0.0;
                        for (zk, wk) in z.iter().zip(&wz) {
                            let y = -1.0 + span * (zk + 1.0);
                            acc += wk * (-half * (xi - y)).exp() * lagrange(&x, j, y);
                        }
                        acc * span * half
                    })
                    .collect()
            })
            .collect();
        Kernel {
            x,
            half,
            end_w,
            decay,
            inner,
        }
    }
}

fn evaluate(tree: &LocalTree, horizon: f64, panels: usize) -> f64 {
    let h = horizon / panels as f64;
    let k = Kernel::new(h);
    let points = panels * NODES;
    let ages: Vec<f64> = (0..points)
        .map(|idx| {
            let (p, j) = (idx / NODES, idx % NODES);
            p as f64 * h + k.half * (k.x[j] + 1.0)
        })
        .collect();
    let n = tree.len();
    let mut grid: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut at_end = vec![0.0; n];
    let full_decay = (-h).exp();
    for i in (1..n).rev() {
        let b = tree.boundary[i] as f64;
        let mut f: Vec<f64> = ages.iter().map(|s| (-b * s).exp()).collect();
        for &c in &tree.children[i] {
            for (fv, gv) in f.iter_mut().zip(&grid[c]) {
                *fv *= gv;
            }
            grid[c] = Vec::new();
        }
        let mut g = vec![0.0; points];
        let mut start = 0.0;
        for p in 0..panels {
            let fp = &f[p * NODES..(p + 1) * NODES];
            for r in 0..NODES {
                let conv: f64 = k.inner[r].iter().zip(fp).map(|(m, fv)| m * fv).sum();
                g[p * NODES + r] = k.decay[r] * start + conv;
            }
            start = full_decay * start + k.end_w.iter().zip(fp).map(|(w, fv)| w * fv).sum::<f64>();
        }
        grid[i] = g;
        at_end[i] = start;
    }
    let mut log_p = -(tree.boundary[0] as f64) * horizon;
    for &c in &tree.children[0] {
        log_p += at_end[c].ln();
    }
    log_p
}

pub(crate) fn panel_tree_likelihood(tree: &LocalTree, horizon: f64, q: &QuadratureConfig) -> Result<f64> {
    if tree.len() == 1 {
        return Ok(-(tree.boundary[0] as f64) * horizon);
    }
    let rate: usize = tree.boundary.iter().sum::<usize>() + tree.len();
    let mut panels = ((horizon * rate as f64 / 2.0).ceil() as usize).max(8);
    let mut coarse = evaluate(tree, horizon, panels);
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let fine = evaluate(tree, horizon, panels);
        if !fine.is_finite() {
            return Err(Error::Numerical {
                context: "exact tree likelihood",
                detail: format!("grid values underflowed at T={horizon} with {} nodes", tree.len()),
            });
        }
        if (fine - coarse).abs() <= q.rel_tol.max(1e-13) {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::Numerical {
        context: "exact tree likelihood",
        detail: format!("no convergence at T={horizon} after {panels} panels"),
    })
}
