//! Quotient distances for finite groups and tori.
//!
//! For the torus the squared distance is
//! `F(θ) = C − 2 Σᵢ rᵢ cos((θW)ᵢ + φᵢ)`
//! with `rᵢ = |xᵢ||yᵢ|` per plane. Its Hessian is bounded by
//! `M = 2 Σᵢ rᵢ |Wᵢ|²`, which gives the cell lower bound
//! `F(c) − |∇F(c)|ρ − Mρ²/2` on a cube of circumradius `ρ`. The search is a
//! grid of starts polished by Newton steps, followed by bisection of every cell
//! whose lower bound can still beat the incumbent.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::actions::{FiniteOrthGroup, TorusAction};
use crate::error::{Error, Result};

pub fn quotient_distance_finite(group: &FiniteOrthGroup, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    group
        .elements()
        .iter()
        .map(|g| (x - g * y).norm())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusDistanceOptions {
    /// Starting grid resolution per torus coordinate.
    pub grid: usize,
    /// Maximum bisection depth.
    pub refinements: usize,
    /// Requested bound on `value − true distance`.
    pub tol: f64,
    /// Cap on the number of live cells at any depth.
    pub max_cells: usize,
}

impl Default for TorusDistanceOptions {
    fn default() -> Self {
        Self {
            grid: 16,
            refinements: 40,
            tol: 1e-7,
            max_cells: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusDistance {
    pub value: f64,
    /// Certified bound on `value − true distance`.
    pub gap: f64,
    /// Torus angles attaining `value`.
    pub angles: Vec<f64>,
}

struct Objective {
    constant: f64,
    r: Vec<f64>,
    phi: Vec<f64>,
    w: DMatrix<f64>,
    hess_bound: f64,
}

impl Objective {
    fn new(action: &TorusAction, x: &DVector<f64>, y: &DVector<f64>) -> Self {
        let n = action.n();
        let w = action.weights_f64().clone();
        let mut r = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        let mut constant = x.norm_squared() + y.norm_squared();
        for i in 0..n {
            let (a, b) = (x[2 * i], x[2 * i + 1]);
            let (c, d) = (y[2 * i], y[2 * i + 1]);
            r.push(libm::hypot(a, b) * libm::hypot(c, d));
            phi.push(libm::atan2(d, c) - libm::atan2(b, a));
        }
        for j in 2 * n..x.len() {
            constant -= 2.0 * x[j] * y[j];
        }
        let hess_bound = 2.0
            * (0..n)
                .map(|i| r[i] * w.column(i).norm_squared())
                .sum::<f64>();
        Self {
            constant,
            r,
            phi,
            w,
            hess_bound,
        }
    }

    fn args(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.r.len())
            .map(|i| {
                let mut s = self.phi[i];
                for (a, t) in theta.iter().enumerate() {
                    s += t * self.w[(a, i)];
                }
                s
            })
            .collect()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let args = self.args(theta);
        let mut f = self.constant;
        for (r, s) in self.r.iter().zip(&args) {
            f -= 2.0 * r * libm::cos(*s);
        }
        f
    }

    fn value_grad_hess(&self, theta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let k = theta.len();
        let args = self.args(theta);
        let mut f = self.constant;
        let mut g = DVector::zeros(k);
        let mut h = DMatrix::zeros(k, k);
        for (i, s) in args.iter().enumerate() {
            let (sn, cs) = (libm::sin(*s), libm::cos(*s));
            let r = self.r[i];
            f -= 2.0 * r * cs;
            for a in 0..k {
                let wa = self.w[(a, i)];
                g[a] += 2.0 * r * sn * wa;
                for b in 0..k {
                    h[(a, b)] += 2.0 * r * cs * wa * self.w[(b, i)];
                }
            }
        }
        (f, g, h)
    }

    fn grad_norm(&self, theta: &[f64]) -> (f64, f64) {
        let (f, g, _) = self.value_grad_hess(theta);
        (f, g.norm())
    }

    /// Newton with a gradient-step fallback and backtracking.
    fn polish(&self, start: &[f64]) -> (f64, Vec<f64>) {
        let mut theta = start.to_vec();
        let (mut f, _, _) = self.value_grad_hess(&theta);
        for _ in 0..100 {
            let (_, g, h) = self.value_grad_hess(&theta);
            if g.norm() <= 1e-15 * (1.0 + self.hess_bound) {
                break;
            }
            let newton = h
                .clone()
                .cholesky()
                .map(|c| -c.solve(&g))
                .filter(|d| d.dot(&g) < 0.0);
            let dir = newton.unwrap_or_else(|| -&g / self.hess_bound.max(1e-300));
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> = theta.iter().zip(dir.iter()).map(|(t, d)| t + step * d).collect();
                let (fc, gc) = self.grad_norm(&cand);
                // Near the minimum `F` is below rounding; fall back on the gradient.
                let flat = fc <= f + 1e-14 * (1.0 + self.constant.abs()) && gc < g.norm();
                if fc < f || flat {
                    theta = cand;
                    f = fc;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (f, theta)
    }
}

struct Cell {
    center: Vec<f64>,
    value: f64,
}

pub fn quotient_distance_torus(
    action: &TorusAction,
    x: &DVector<f64>,
    y: &DVector<f64>,
    opts: &TorusDistanceOptions,
) -> Result<TorusDistance> {
    let m = action.ambient_dim();
    if x.len() != m || y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if x.len() != m { x.len() } else { y.len() },
        });
    }
    if opts.grid == 0 || !(opts.tol >= 0.0) {
        return Err(Error::InvalidArgument("grid must be positive and tol nonnegative"));
    }
    let k = action.k();
    if k == 0 {
        return Ok(TorusDistance {
            value: torus_distance_at(action, x, y, &[]),
            gap: 0.0,
            angles: Vec::new(),
        });
    }
    let obj = Objective::new(action, x, y);

    let mut cells = Vec::new();
    let h0 = PI / opts.grid as f64;
    let total = opts.grid.pow(k as u32);
    for idx in 0..total {
        let mut rem = idx;
        let center: Vec<f64> = (0..k)
            .map(|_| {
                let j = rem % opts.grid;
                rem /= opts.grid;
                (2 * j + 1) as f64 * h0
            })
            .collect();
        let value = obj.value(&center);
        cells.push(Cell { center, value });
    }

    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].value.total_cmp(&cells[b].value));
    let mut best_f = f64::INFINITY;
    let mut best_theta = Vec::new();
    for &i in order.iter().take(4.min(order.len())) {
        let (f, t) = obj.polish(&cells[i].center);
        if f < best_f {
            best_f = f;
            best_theta = t;
        }
    }

    let sqrt_k = libm::sqrt(k as f64);
    let threshold = |bf: f64| {
        let d = libm::sqrt(bf.max(0.0)) - opts.tol;
        if d > 0.0 { d * d } else { 0.0 }
    };
    let mut min_pruned = f64::INFINITY;
    let mut h = h0;
    let mut depth = 0;
    let mut live = cells;
    loop {
        let rho = h * sqrt_k;
        let thr = threshold(best_f);
        let mut survivors = Vec::new();
        for cell in live {
            let (f, g) = obj.grad_norm(&cell.center);
            let lb = f - g * rho - 0.5 * obj.hess_bound * rho * rho;
            if lb >= thr {
                min_pruned = min_pruned.min(lb);
            } else {
                survivors.push((cell, lb));
            }
        }
        if survivors.is_empty() || depth == opts.refinements || survivors.len() << k > opts.max_cells {
            let min_open = survivors.iter().map(|(_, lb)| *lb).fold(f64::INFINITY, f64::min);
            // Polishing the best surviving cell can only lower the incumbent.
            if let Some((c, _)) = survivors.iter().min_by(|a, b| a.0.value.total_cmp(&b.0.value)) {
                let (f, t) = obj.polish(&c.center);
                if f < best_f {
                    best_f = f;
                    best_theta = t;
                }
            }
            let floor = libm::sqrt(min_open.min(min_pruned).max(0.0));
            // Direct evaluation avoids the cancellation in `F` near zero.
            let value = torus_distance_at(action, x, y, &best_theta).min(libm::sqrt(best_f.max(0.0)));
            let gap = (value - floor).max(0.0);
            if gap > opts.tol {
                return Err(Error::GridTooCoarse { gap, tol: opts.tol });
            }
            return Ok(TorusDistance {
                value,
                gap,
                angles: best_theta,
            });
        }
        h *= 0.5;
        depth += 1;
        let mut next = Vec::with_capacity(survivors.len() << k);
        let mut local_best: Option<(f64, Vec<f64>)> = None;
        for (cell, _) in survivors {
            for corner in 0..(1usize << k) {
                let center: Vec<f64> = (0..k)
                    .map(|a| cell.center[a] + if corner & (1 << a) != 0 { h } else { -h })
                    .collect();
                let value = obj.value(&center);
                if local_best.as_ref().is_none_or(|(f, _)| value < *f) {
                    local_best = Some((value, center.clone()));
                }
                next.push(Cell { center, value });
            }
        }
        if let Some((f, c)) = local_best {
            if f < best_f {
                let (pf, pt) = obj.polish(&c);
                best_f = pf.min(f);
                best_theta = if pf <= f { pt } else { c };
            }
        }
        live = next;
    }
}

fn torus_distance_at(action: &TorusAction, x: &DVector<f64>, y: &DVector<f64>, theta: &[f64]) -> f64 {
    (x - action.rotation(theta) * y).norm()
}
