//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::{Array1, ArrayView1, ArrayView2};

/// `½‖z − w‖² + η₁(‖z‖₂ + μ‖z‖₁)`.
pub fn sgl_prox_objective(z: &[f64], w: &[f64], eta1: f64, mu: f64) -> f64 {
    let d: f64 = z.iter().zip(w).map(|(a, b)| (a - b).powi(2)).sum();
    let l2 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let l1: f64 = z.iter().map(|v| v.abs()).sum();
    0.5 * d + eta1 * (l2 + mu * l1)
}

/// Grid search with `points` per axis over a box centred at the origin,
/// refined around the best point (step divided by `shrink`) until the step
/// reaches `resolution`. The grid always contains the
/// coordinate axes, where the minimiser usually sits when it is sparse.
pub fn grid_minimize(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    half_width: f64,
    resolution: f64,
    points: i64,
    shrink: f64,
) -> Vec<f64> {
    let mut centre = vec![0.0; dim];
    let mut step = 2.0 * half_width / (points - 1) as f64;
    loop {
        let mut best = (f64::INFINITY, centre.clone());
        let mut idx = vec![0i64; dim];
        let total = (points as usize).pow(dim as u32);
        for _ in 0..total {
            let z: Vec<f64> = centre
                .iter()
                .zip(&idx)
                .map(|(c, &i)| snap(c + (i - points / 2) as f64 * step, step))
                .collect();
            let v = f(&z);
            if v < best.0 {
                best = (v, z);
            }
            for d in idx.iter_mut() {
                *d += 1;
                if *d < points {
                    break;
                }
                *d = 0;
            }
        }
        centre = best.1;
        if step <= resolution * (1.0 + 1e-9) {
            return centre;
        }
        step = (step / shrink).max(resolution);
    }
}

/// Whether a grid minimiser `grid` agrees with the exact minimiser `z` of
/// a 1-strongly convex `f` up to the grid's resolution. Next to a kink the
/// lattice cannot place the minimiser to within one step; strong convexity
/// then bounds the gap by `√(2 [f(z̃) − f(z)])`, with `z̃` the lattice point
/// nearest `z`.
pub fn within_grid_resolution(z: &[f64], grid: &[f64], f: impl Fn(&[f64]) -> f64, resolution: f64) -> bool {
    let nearest: Vec<f64> = z.iter().map(|v| snap(*v, resolution)).collect();
    let slack = (2.0 * (f(&nearest) - f(z)).max(0.0)).sqrt();
    let tol = resolution.max(slack) + 1e-12;
    z.iter().zip(grid).all(|(a, b)| (a - b).abs() <= tol)
}

/// Rounds to the step lattice so that zero is always a candidate.
fn snap(v: f64, step: f64) -> f64 {
    (v / step).round() * step
}

/// Cyclic coordinate descent for `½‖y − Φx‖² + λ‖x‖₁`.
pub fn lasso_cd(phi: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64, max_sweeps: usize) -> Array1<f64> {
    let p = phi.ncols();
    let mut x = Array1::<f64>::zeros(p);
    let mut r = y.to_owned();
    let norms: Vec<f64> = (0..p).map(|j| phi.column(j).dot(&phi.column(j))).collect();
    for _ in 0..max_sweeps {
        let mut biggest = 0.0_f64;
        for j in 0..p {
            if norms[j] == 0.0 {
                continue;
            }
            let col = phi.column(j);
            let rho = col.dot(&r) + norms[j] * x[j];
            let new = rho.signum() * (rho.abs() - lambda).max(0.0) / norms[j];
            let delta = new - x[j];
            if delta != 0.0 {
                r.scaled_add(-delta, &col);
                x[j] = new;
                biggest = biggest.max(delta.abs());
            }
        }
        if biggest < 1e-14 {
            break;
        }
    }
    x
}

pub fn lasso_objective(phi: ArrayView2<f64>, y: ArrayView1<f64>, x: ArrayView1<f64>, lambda: f64) -> f64 {
    let r = &y - &phi.dot(&x);
    0.5 * r.dot(&r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Golden-section minimisation of a convex function on `[a, b]`.
pub fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Latent group norm for groups `{0, 1, 2}` and `{2, 3}` in four
/// dimensions: the only freedom is how coordinate 2 is split.
pub fn latent_norm_4d(x: &[f64]) -> f64 {
    let cost = |a: f64| {
        (x[0] * x[0] + x[1] * x[1] + a * a).sqrt() + ((x[2] - a).powi(2) + x[3] * x[3]).sqrt()
    };
    let lo = x[2].min(0.0) - 1.0;
    let hi = x[2].max(0.0) + 1.0;
    cost(golden(cost, lo, hi, 1e-12))
}

/// Composite Simpson rule with `intervals` (even) sub-intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

pub fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
