//! SOG lasso fits by accelerated proximal gradient in the duplicated space.
//!
//! The Lagrangian objective
//!
//! ```text
//! loss(Φx) + η₁ h(x) + η₂ ‖x‖²,   x = collapse(w)
//! ```
//!
//! is minimised over the duplicated coefficients `w`, where the penalty is
//! separable across blocks and its prox is [`prox_sparse_group`]. The
//! iteration is monotone FISTA: a candidate that does not decrease the
//! objective is rejected and the momentum restarted.
//!
//! [`prox_sparse_group`]: crate::prox::prox_sparse_group

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{DuplicationMap, GroupLayout};
use crate::linalg;
use crate::penalty::{decomposition_objective, dual_norm, PenaltyParams};
use crate::prox::prox_weighted_inplace;
use crate::simulate::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `Σᵢ −yᵢ ⟨φᵢ, x⟩` with `yᵢ ∈ {−1, +1}`.
    LinearClassification,
    /// `½ ‖y − Φx‖²`.
    Squared,
}

impl Loss {
    pub fn is_classification(self) -> bool {
        self == Loss::LinearClassification
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Fixed(f64),
    /// Start from `initial` (or `1 / L̂` from power iteration when `None`)
    /// and multiply by `factor` until the quadratic upper bound holds.
    Backtracking { factor: f64, initial: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eta1: f64,
    pub eta2: f64,
    pub params: PenaltyParams,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub step_rule: StepRule,
    pub acceleration: bool,
    pub seed: u64,
    pub debias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta1: 1.0,
            eta2: 0.0,
            params: PenaltyParams::new(1.0, 1).expect("valid default"),
            max_iters: 20_000,
            rel_tol: 1e-10,
            step_rule: StepRule::Backtracking { factor: 0.5, initial: None },
            acceleration: true,
            seed: 0,
            debias: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, loss: Loss) -> Result<()> {
        if !(self.eta1 > 0.0 && self.eta1.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta1 must be positive, got {}", self.eta1)));
        }
        if !(self.eta2 >= 0.0 && self.eta2.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta2 must be >= 0, got {}", self.eta2)));
        }
        if loss.is_classification() && self.eta2 == 0.0 {
            // −⟨Φᵀy, x⟩ + η₁h(x) is positively homogeneous: its infimum is 0 or −∞.
            return Err(Error::InvalidArgument(
                "linear-classification loss needs eta2 > 0 to be bounded below".into(),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        match self.step_rule {
            StepRule::Fixed(g) if !(g > 0.0) => Err(Error::InvalidArgument(format!("step must be positive, got {g}"))),
            StepRule::Backtracking { factor, .. } if !(factor > 0.0 && factor < 1.0) => Err(Error::InvalidArgument(
                format!("backtracking factor must lie in (0, 1), got {factor}"),
            )),
            StepRule::Backtracking { initial: Some(g), .. } if !(g > 0.0) => {
                Err(Error::InvalidArgument(format!("initial step must be positive, got {g}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Collapsed estimate, debiased when the config asks for it.
    pub x_hat: Array1<f64>,
    /// Collapsed estimate before debiasing.
    pub x_raw: Array1<f64>,
    pub w_hat: Array1<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub support: Vec<usize>,
    pub active_groups: Vec<usize>,
    /// Set when debiasing hit a rank-deficient restricted system.
    pub debias_rank_deficient: bool,
    /// Final step size.
    pub step: f64,
}

/// The objective in the duplicated space.
#[derive(Debug, Clone)]
pub struct ExpandedProblem<'a> {
    phi: ArrayView2<'a, f64>,
    y: ArrayView1<'a, f64>,
    map: DuplicationMap,
    loss: Loss,
    eta1: f64,
    eta2: f64,
    weights: Vec<(f64, f64)>,
}

impl<'a> ExpandedProblem<'a> {
    pub fn new(
        phi: ArrayView2<'a, f64>,
        y: ArrayView1<'a, f64>,
        layout: &GroupLayout,
        loss: Loss,
        config: &SolverConfig,
    ) -> Result<Self> {
        check_data(phi, y, layout, loss)?;
        config.validate(loss)?;
        Ok(Self {
            phi,
            y,
            map: DuplicationMap::new(layout),
            loss,
            eta1: config.eta1,
            eta2: config.eta2,
            weights: config.params.weights(layout)?,
        })
    }

    pub fn map(&self) -> &DuplicationMap {
        &self.map
    }

    /// Smooth part and its gradient with respect to `w`.
    pub fn smooth(&self, w: ArrayView1<f64>) -> (f64, Array1<f64>) {
        let x = self.map.collapse(w).expect("expanded length");
        let (value, grad_x) = match self.loss {
            Loss::Squared => {
                let r = self.phi.dot(&x) - self.y;
                (0.5 * r.dot(&r), self.phi.t().dot(&r))
            }
            Loss::LinearClassification => {
                let c = self.phi.t().dot(&self.y);
                (-c.dot(&x), -c)
            }
        };
        let value = value + self.eta2 * x.dot(&x);
        let grad_x = grad_x + &(2.0 * self.eta2 * &x);
        (value, self.map.replicate(grad_x.view()).expect("original length"))
    }

    pub fn smooth_value(&self, w: ArrayView1<f64>) -> f64 {
        let x = self.map.collapse(w).expect("expanded length");
        let value = match self.loss {
            Loss::Squared => {
                let r = self.phi.dot(&x) - self.y;
                0.5 * r.dot(&r)
            }
            Loss::LinearClassification => -self.y.dot(&self.phi.dot(&x)),
        };
        value + self.eta2 * x.dot(&x)
    }

    pub fn penalty(&self, w: ArrayView1<f64>) -> f64 {
        self.eta1 * decomposition_objective(w, &self.map, &self.weights)
    }

    pub fn objective(&self, w: ArrayView1<f64>) -> f64 {
        self.smooth_value(w) + self.penalty(w)
    }

    /// `prox_{γ η₁ Ω}(v)` for the block penalty `Ω`.
    pub fn prox(&self, v: &Array1<f64>, step: f64) -> Array1<f64> {
        let thresholds: Vec<(f64, f64)> = self
            .weights
            .iter()
            .map(|&(a, b)| (step * self.eta1 * a, step * self.eta1 * b))
            .collect();
        let mut out = v.clone();
        prox_weighted_inplace(&mut out, &self.map, &thresholds);
        out
    }

    /// `‖w − prox(w − γ∇f(w))‖₂`; zero exactly at a minimiser.
    pub fn fixed_point_residual(&self, w: ArrayView1<f64>, step: f64) -> f64 {
        let (_, g) = self.smooth(w);
        let z = self.prox(&(&w - &(step * &g)), step);
        let d = &z - &w;
        d.dot(&d).sqrt()
    }

    /// Upper estimate of the Lipschitz constant of the smooth gradient.
    pub fn lipschitz_estimate(&self) -> Result<f64> {
        let ridge = 2.0 * self.eta2 * self.map.multiplicity().iter().copied().max().unwrap_or(1) as f64;
        Ok(match self.loss {
            Loss::Squared => {
                let dup = self.map.expand_design(self.phi)?;
                linalg::spectral_norm_sq(dup.view(), 50) + ridge
            }
            Loss::LinearClassification => ridge,
        })
    }
}

fn check_data(phi: ArrayView2<f64>, y: ArrayView1<f64>, layout: &GroupLayout, loss: Loss) -> Result<()> {
    if phi.ncols() != layout.dim() {
        return Err(Error::DimensionMismatch {
            what: "design columns vs layout dimension",
            expected: layout.dim(),
            got: phi.ncols(),
        });
    }
    if phi.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "labels vs design rows",
            expected: phi.nrows(),
            got: y.len(),
        });
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("labels".into()));
    }
    if loss.is_classification() {
        if let Some((row, &value)) = y.iter().enumerate().find(|(_, v)| **v != 1.0 && **v != -1.0) {
            return Err(Error::InvalidLabel { row, value });
        }
    }
    Ok(())
}

pub fn fit(
    phi: ArrayView2<f64>,
    y: ArrayView1<f64>,
    layout: &GroupLayout,
    loss: Loss,
    config: &SolverConfig,
) -> Result<FitResult> {
    fit_from(phi, y, layout, loss, config, None)
}

/// Like [`fit`], optionally warm-started from duplicated coefficients `init`.
pub fn fit_from(
    phi: ArrayView2<f64>,
    y: ArrayView1<f64>,
    layout: &GroupLayout,
    loss: Loss,
    config: &SolverConfig,
    init: Option<ArrayView1<f64>>,
) -> Result<FitResult> {
    let problem = ExpandedProblem::new(phi, y, layout, loss, config)?;
    let map = problem.map();
    let dim = map.expanded_dim();

    let mut w = match init {
        Some(w0) => {
            map.check_expanded(w0.len())?;
            w0.to_owned()
        }
        None => Array1::zeros(dim),
    };
    let (mut step, backtrack) = match config.step_rule {
        StepRule::Fixed(g) => (g, None),
        StepRule::Backtracking { factor, initial } => {
            let g = match initial {
                Some(g) => g,
                None => {
                    let l = problem.lipschitz_estimate()?;
                    if l > 0.0 {
                        1.0 / l
                    } else {
                        1.0
                    }
                }
            };
            (g, Some(factor))
        }
    };

    let mut objective = problem.objective(w.view());
    if !objective.is_finite() {
        return Err(Error::NonFiniteObjective { iteration: 0, snapshot: w });
    }
    let mut trace = vec![objective];
    let mut anchor = w.clone();
    let mut t = 1.0_f64;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iters {
        iterations += 1;
        let (f_anchor, grad) = problem.smooth(anchor.view());
        let mut z;
        loop {
            z = problem.prox(&(&anchor - &(step * &grad)), step);
            let Some(factor) = backtrack else { break };
            let d = &z - &anchor;
            let bound = f_anchor + grad.dot(&d) + d.dot(&d) / (2.0 * step);
            let fz = problem.smooth_value(z.view());
            if fz <= bound + 1e-12 * bound.abs().max(1.0) || step < 1e-300 {
                break;
            }
            step *= factor;
        }
        let fz_total = problem.objective(z.view());
        if !fz_total.is_finite() {
            return Err(Error::NonFiniteObjective {
                iteration: iterations,
                snapshot: z,
            });
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let accepted = fz_total <= objective;
        let w_next = if accepted { z.clone() } else { w.clone() };
        anchor = if config.acceleration && accepted {
            &w_next + &((t - 1.0) / t_next * (&w_next - &w))
        } else {
            w_next.clone()
        };
        t = if accepted { t_next } else { 1.0 };

        let previous = objective;
        if accepted {
            objective = fz_total;
        }
        w = w_next;
        trace.push(objective);

        let rel = (previous - objective) / objective.abs().max(1.0);
        if accepted && rel <= config.rel_tol {
            let wn = w.dot(&w).sqrt().max(1.0);
            if problem.fixed_point_residual(w.view(), step) <= config.rel_tol.sqrt() * wn {
                converged = true;
                break;
            }
        }
    }

    let x_raw = map.collapse(w.view())?;
    let support: Vec<usize> = x_raw.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
    let active_groups: Vec<usize> = map
        .group_ranges()
        .iter()
        .enumerate()
        .filter(|(_, r)| w.slice(s![(*r).clone()]).iter().any(|v| *v != 0.0))
        .map(|(g, _)| g)
        .collect();
    let mut result = FitResult {
        x_hat: x_raw.clone(),
        x_raw,
        w_hat: w,
        objective_trace: trace,
        iterations,
        converged,
        support,
        active_groups,
        debias_rank_deficient: false,
        step,
    };
    if config.debias {
        let (x, deficient) = debias(&result, phi, y, loss)?;
        result.x_hat = x;
        result.debias_rank_deficient = deficient;
    }
    Ok(result)
}

/// Unpenalised least-squares refit on the fitted support. For the
/// classification loss the refit is normalised to unit length.
/// Returns the refit and whether the restricted system was rank deficient.
pub fn debias(fit: &FitResult, phi: ArrayView2<f64>, y: ArrayView1<f64>, loss: Loss) -> Result<(Array1<f64>, bool)> {
    let p = fit.x_raw.len();
    if phi.ncols() != p || phi.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "debias design",
            expected: p,
            got: phi.ncols(),
        });
    }
    let mut x = Array1::zeros(p);
    if fit.support.is_empty() {
        return Ok((x, false));
    }
    let sub = phi.select(ndarray::Axis(1), &fit.support);
    let (coef, deficient) = linalg::min_norm_lstsq(sub.view(), y)?;
    for (&i, &c) in fit.support.iter().zip(coef.iter()) {
        x[i] = c;
    }
    if loss.is_classification() {
        let norm = x.dot(&x).sqrt();
        if norm > 0.0 {
            x /= norm;
        }
    }
    Ok((x, deficient))
}

/// Smallest `η₁` for which `x = 0` is optimal: the dual norm of `Φᵀy`.
pub fn eta1_max(phi: ArrayView2<f64>, y: ArrayView1<f64>, layout: &GroupLayout, params: &PenaltyParams) -> Result<f64> {
    if phi.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "labels vs design rows",
            expected: phi.nrows(),
            got: y.len(),
        });
    }
    dual_norm(phi.t().dot(&y).view(), layout, params)
}

/// Misclassification rate of `sign(Φx)` (with `sign(0) = +1`) or mean
/// squared prediction error.
pub fn validation_error(phi: ArrayView2<f64>, y: ArrayView1<f64>, x: ArrayView1<f64>, loss: Loss) -> f64 {
    let pred = phi.dot(&x);
    let n = y.len().max(1) as f64;
    match loss {
        Loss::LinearClassification => {
            pred.iter()
                .zip(y.iter())
                .filter(|(p, y)| (if **p >= 0.0 { 1.0 } else { -1.0 }) != **y)
                .count() as f64
                / n
        }
        Loss::Squared => pred.iter().zip(y.iter()).map(|(p, y)| (p - y).powi(2)).sum::<f64>() / n,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    pub config_index: usize,
    pub mean_error: f64,
    pub folds_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub best_index: usize,
    pub best: SolverConfig,
    pub table: Vec<CvRow>,
    /// Folds skipped because a split held a single class.
    pub skipped_folds: Vec<usize>,
}

/// Fold index of every sample: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(seed, u64::MAX));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

pub fn cross_validate(
    phi: ArrayView2<f64>,
    y: ArrayView1<f64>,
    layout: &GroupLayout,
    loss: Loss,
    grid: &[SolverConfig],
    folds: usize,
    seed: u64,
) -> Result<CvResult> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    check_data(phi, y, layout, loss)?;
    if folds > y.len() {
        return Err(Error::InvalidArgument(format!("{folds} folds for {} samples", y.len())));
    }
    let assignment = fold_assignment(y.len(), folds, seed);
    let split = |f: usize| {
        let (mut train, mut valid) = (Vec::new(), Vec::new());
        for (i, &a) in assignment.iter().enumerate() {
            if a == f {
                valid.push(i)
            } else {
                train.push(i)
            }
        }
        (train, valid)
    };
    let single_class = |idx: &[usize]| {
        let first = y[idx[0]];
        idx.iter().all(|&i| y[i] == first)
    };
    let mut usable = Vec::new();
    let mut skipped_folds = Vec::new();
    for f in 0..folds {
        let (train, valid) = split(f);
        if loss.is_classification() && (single_class(&train) || single_class(&valid)) {
            skipped_folds.push(f);
        } else {
            usable.push((f, train, valid));
        }
    }
    if usable.is_empty() {
        return Err(Error::InvalidArgument("every fold holds a single class".into()));
    }

    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|c| (0..usable.len()).map(move |f| (c, f))).collect();
    let errors: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(c, f)| {
            let (_, train, valid) = &usable[f];
            let phi_t = phi.select(ndarray::Axis(0), train);
            let y_t = y.select(ndarray::Axis(0), train);
            let fit = fit(phi_t.view(), y_t.view(), layout, loss, &grid[c])?;
            let phi_v = phi.select(ndarray::Axis(0), valid);
            let y_v = y.select(ndarray::Axis(0), valid);
            Ok(validation_error(phi_v.view(), y_v.view(), fit.x_hat.view(), loss))
        })
        .collect();
    let mut table: Vec<CvRow> = (0..grid.len())
        .map(|c| CvRow { config_index: c, mean_error: 0.0, folds_used: 0 })
        .collect();
    for (&(c, _), e) in jobs.iter().zip(errors) {
        table[c].mean_error += e?;
        table[c].folds_used += 1;
    }
    for row in &mut table {
        row.mean_error /= row.folds_used as f64;
    }
    let best_index = (0..grid.len())
        .min_by(|&a, &b| {
            let (ea, eb) = (table[a].mean_error, table[b].mean_error);
            if (ea - eb).abs() <= 1e-12 {
                grid[b].eta1.total_cmp(&grid[a].eta1)
            } else {
                ea.total_cmp(&eb)
            }
        })
        .expect("non-empty grid");
    Ok(CvResult {
        best_index,
        best: grid[best_index].clone(),
        table,
        skipped_folds,
    })
}

/// Stacks `T` tasks into one problem: block-diagonal design, concatenated
/// labels, and groups that collect each base group across all tasks.
pub fn stack_multitask(
    phis: &[Array2<f64>],
    ys: &[Array1<f64>],
    base_layout: &GroupLayout,
) -> Result<(Array2<f64>, Array1<f64>, GroupLayout)> {
    if phis.is_empty() || phis.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            what: "number of label vectors",
            expected: phis.len(),
            got: ys.len(),
        });
    }
    let p = base_layout.dim();
    for (phi, y) in phis.iter().zip(ys) {
        if phi.ncols() != p {
            return Err(Error::DimensionMismatch {
                what: "task design columns",
                expected: p,
                got: phi.ncols(),
            });
        }
        if phi.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                what: "task labels",
                expected: phi.nrows(),
                got: y.len(),
            });
        }
    }
    let tasks = phis.len();
    let total_rows: usize = phis.iter().map(|m| m.nrows()).sum();
    let mut block = Array2::zeros((total_rows, tasks * p));
    let mut stacked = Array1::zeros(total_rows);
    let mut row = 0;
    for (t, (phi, y)) in phis.iter().zip(ys).enumerate() {
        let n = phi.nrows();
        block.slice_mut(s![row..row + n, t * p..(t + 1) * p]).assign(phi);
        stacked.slice_mut(s![row..row + n]).assign(y);
        row += n;
    }
    let groups = base_layout
        .groups()
        .iter()
        .map(|g| (0..tasks).flat_map(|t| g.iter().map(move |&i| t * p + i)).collect())
        .collect();
    Ok((block, stacked, GroupLayout::new(groups, tasks * p)?))
}
