//! Simulation drivers behind the `phase`, `toy-regression`, `width` and
//! `penalty-table` subcommands.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::GroupLayout;
use crate::meanwidth::{bound_nc, bound_nc_counted, chisq_max_check, mean_and_se, sup_nc_exact, ENUMERATION_GUARD};
use crate::meanwidth::ln_binomial;
use crate::penalty::{eval_penalty, PenaltyParams, DEFAULT_TOL};
use crate::simulate::{gen_design, gen_ground_truth, gen_labels, rng_for, Covariance, DesignSpec, ObservationModel};
use crate::solver::{eta1_max, fit_from, FitResult, Loss, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Lasso,
    Glasso,
    Oglasso,
    Soglasso,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lasso, Method::Glasso, Method::Oglasso, Method::Soglasso];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lasso => "lasso",
            Method::Glasso => "glasso",
            Method::Oglasso => "oglasso",
            Method::Soglasso => "soglasso",
        }
    }

    /// The layout this method penalises, derived from the structural layout.
    pub fn layout(self, base: &GroupLayout) -> Result<GroupLayout> {
        match self {
            Method::Lasso => GroupLayout::singletons(base.dim()),
            Method::Glasso => disjoint_version(base),
            Method::Oglasso | Method::Soglasso => Ok(base.clone()),
        }
    }

    /// `λ₁` used by this method; only SOGlasso keeps a within-group term.
    pub fn lambda1(self, soglasso_lambda1: f64) -> f64 {
        match self {
            Method::Soglasso => soglasso_lambda1,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Drops overlaps by keeping each coordinate only in the last group that
/// contains it. Disjoint layouts come back unchanged.
pub fn disjoint_version(layout: &GroupLayout) -> Result<GroupLayout> {
    if layout.is_disjoint() {
        return Ok(layout.clone());
    }
    let mut groups = vec![Vec::new(); layout.num_groups()];
    for i in 0..layout.dim() {
        let owner = *layout.groups_of(i).iter().max().expect("covered coordinate");
        groups[owner].push(i);
    }
    groups.retain(|g| !g.is_empty());
    GroupLayout::new(groups, layout.dim())
}

fn loss_for(model: ObservationModel) -> Loss {
    if model.is_classification() {
        Loss::LinearClassification
    } else {
        Loss::Squared
    }
}

/// Solver settings for one method at `η₁ = frac · η₁,max`.
fn method_config(
    phi: ArrayView2<f64>,
    y: ArrayView1<f64>,
    layout: &GroupLayout,
    loss: Loss,
    lambda1: f64,
    frac: f64,
) -> Result<SolverConfig> {
    let params = PenaltyParams::new(lambda1, 1)?;
    let max = eta1_max(phi, y, layout, &params)?;
    Ok(SolverConfig {
        eta1: (frac * max).max(f64::MIN_POSITIVE),
        eta2: if loss.is_classification() { 1.0 } else { 0.0 },
        params,
        max_iters: 5000,
        rel_tol: 1e-9,
        ..SolverConfig::default()
    })
}

fn unit_or_zero(x: &Array1<f64>) -> Array1<f64> {
    let n = x.dot(x).sqrt();
    if n > 0.0 {
        x / n
    } else {
        x.clone()
    }
}

fn sq_dist(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let d = a - b;
    d.dot(&d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpec {
    pub layout: GroupLayout,
    pub k: usize,
    pub l: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub model: ObservationModel,
    pub covariance: Covariance,
    pub methods: Vec<Method>,
    /// `η₁` as a fraction of the smallest value that zeroes the fit.
    pub eta1_frac: f64,
    pub lambda1: f64,
    pub debias: bool,
    pub seed: u64,
}

impl PhaseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("n grid must be non-empty and strictly increasing".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods selected".into()));
        }
        if !(self.eta1_frac > 0.0 && self.eta1_frac < 1.0) {
            return Err(Error::InvalidArgument(format!("eta1 fraction must lie in (0, 1), got {}", self.eta1_frac)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub method: Method,
    pub n: usize,
    pub trial: usize,
    pub sq_error: f64,
    pub seconds: f64,
}

fn phase_trial(spec: &PhaseSpec, n: usize, trial: usize) -> Vec<PhaseRow> {
    let nan_rows = || {
        spec.methods
            .iter()
            .map(|&method| PhaseRow { method, n, trial, sq_error: f64::NAN, seconds: 0.0 })
            .collect::<Vec<_>>()
    };
    // Truth depends on the trial only, so curves over n are paired.
    let mut truth_rng = rng_for(spec.seed, trial as u64);
    let Ok(truth) = gen_ground_truth(&spec.layout, spec.k, spec.l, &mut truth_rng) else {
        return nan_rows();
    };
    let mut data_rng = rng_for(spec.seed, ((n as u64) << 32) | trial as u64);
    let design = DesignSpec {
        n,
        p: spec.layout.dim(),
        covariance: spec.covariance.clone(),
        seed: spec.seed,
    };
    let Ok(phi) = gen_design(&design, &mut data_rng) else {
        return nan_rows();
    };
    let Ok(y) = gen_labels(phi.view(), truth.x_star.view(), spec.model, &mut data_rng) else {
        return nan_rows();
    };
    let loss = loss_for(spec.model);
    spec.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let estimate = (|| -> Result<Array1<f64>> {
                let layout = method.layout(&spec.layout)?;
                let mut cfg = method_config(phi.view(), y.view(), &layout, loss, method.lambda1(spec.lambda1), spec.eta1_frac)?;
                cfg.debias = spec.debias;
                let fit = fit_from(phi.view(), y.view(), &layout, loss, &cfg, None)?;
                Ok(if loss.is_classification() { unit_or_zero(&fit.x_hat) } else { fit.x_hat })
            })();
            let sq_error = estimate.map_or(f64::NAN, |x| sq_dist(&x, &truth.x_star));
            PhaseRow {
                method,
                n,
                trial,
                sq_error,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// One row per (n, trial, method). Failed fits give `NaN` errors.
pub fn run_phase(spec: &PhaseSpec) -> Result<Vec<PhaseRow>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    Ok(jobs.par_iter().flat_map_iter(|&(n, t)| phase_trial(spec, n, t)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub failures: usize,
}

/// Mean error per `n` for one method, skipping failed trials.
pub fn phase_curve(rows: &[PhaseRow], method: Method) -> Vec<CurvePoint> {
    let mut ns: Vec<usize> = rows.iter().filter(|r| r.method == method).map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let all: Vec<f64> = rows.iter().filter(|r| r.method == method && r.n == n).map(|r| r.sq_error).collect();
            let ok: Vec<f64> = all.iter().copied().filter(|v| v.is_finite()).collect();
            let (mean, std_error) = if ok.is_empty() { (f64::NAN, f64::NAN) } else { mean_and_se(&ok) };
            CurvePoint {
                n,
                mean,
                std_error,
                failures: all.len() - ok.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToySpec {
    pub layout: GroupLayout,
    pub k: usize,
    pub alphas: Vec<f64>,
    pub n: usize,
    pub sigma: f64,
    pub trials: usize,
    pub methods: Vec<Method>,
    /// `η₁` grid as fractions of `η₁,max`, searched clairvoyantly.
    pub eta1_fracs: Vec<f64>,
    /// `λ₁` grid for SOGlasso.
    pub lambda1_grid: Vec<f64>,
    pub seed: u64,
}

impl ToySpec {
    /// Active coordinates per group for density `alpha`, rounded half up.
    pub fn l_for(&self, alpha: f64) -> usize {
        let size = self.layout.max_group_size();
        ((alpha * size as f64 + 0.5).floor() as usize).clamp(1, size)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(Error::InvalidArgument("alphas must lie in (0, 1]".into()));
        }
        if self.methods.is_empty() || self.eta1_fracs.is_empty() || self.lambda1_grid.is_empty() {
            return Err(Error::InvalidArgument("empty method or parameter grid".into()));
        }
        if self.eta1_fracs.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return Err(Error::InvalidArgument("eta1 fractions must lie in (0, 1]".into()));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyRow {
    pub method: Method,
    pub alpha: f64,
    pub mean_mse: f64,
    pub std_error: f64,
}

/// Per-trial MSE at every grid point, walking each `η₁` path from the
/// largest value down with warm starts.
fn toy_trial(spec: &ToySpec, alpha_index: usize, trial: usize) -> Result<Vec<Vec<f64>>> {
    let alpha = spec.alphas[alpha_index];
    let mut rng = rng_for(spec.seed, ((alpha_index as u64) << 32) | trial as u64);
    let truth = gen_ground_truth(&spec.layout, spec.k, spec.l_for(alpha), &mut rng)?;
    let p = spec.layout.dim();
    let design = DesignSpec {
        n: spec.n,
        p,
        covariance: Covariance::Identity,
        seed: spec.seed,
    };
    // Rows scaled to N(0, I/n) so columns have unit expected norm.
    let phi = gen_design(&design, &mut rng)? / (spec.n as f64).sqrt();
    let y = gen_labels(phi.view(), truth.x_star.view(), ObservationModel::linear(spec.sigma.max(f64::MIN_POSITIVE))?, &mut rng)?;
    let mut fracs = spec.eta1_fracs.clone();
    fracs.sort_by(|a, b| b.total_cmp(a));

    let mut per_method = Vec::new();
    for &method in &spec.methods {
        let layout = method.layout(&spec.layout)?;
        let lambdas: Vec<f64> = if method == Method::Soglasso { spec.lambda1_grid.clone() } else { vec![0.0] };
        let mut mses = Vec::new();
        for &lambda1 in &lambdas {
            let mut warm: Option<FitResult> = None;
            for &frac in &fracs {
                let cfg = method_config(phi.view(), y.view(), &layout, Loss::Squared, lambda1, frac)?;
                let fit = fit_from(
                    phi.view(),
                    y.view(),
                    &layout,
                    Loss::Squared,
                    &cfg,
                    warm.as_ref().map(|f| f.w_hat.view()),
                )?;
                mses.push(sq_dist(&fit.x_hat, &truth.x_star) / p as f64);
                warm = Some(fit);
            }
        }
        per_method.push(mses);
    }
    Ok(per_method)
}

/// Mean MSE for each (alpha, method), with the regularisation picked to
/// minimise the mean over trials.
pub fn run_toy_regression(spec: &ToySpec) -> Result<Vec<ToyRow>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.alphas.len())
        .flat_map(|a| (0..spec.trials).map(move |t| (a, t)))
        .collect();
    let results: Vec<Result<Vec<Vec<f64>>>> = jobs.par_iter().map(|&(a, t)| toy_trial(spec, a, t)).collect();
    let mut rows = Vec::new();
    for (a, &alpha) in spec.alphas.iter().enumerate() {
        let trials: Vec<&Vec<Vec<f64>>> = jobs
            .iter()
            .zip(&results)
            .filter(|((ja, _), _)| *ja == a)
            .filter_map(|(_, r)| r.as_ref().ok())
            .collect();
        for (m, &method) in spec.methods.iter().enumerate() {
            let row = if trials.is_empty() {
                ToyRow { method, alpha, mean_mse: f64::NAN, std_error: f64::NAN }
            } else {
                let points = trials[0][m].len();
                let best = (0..points)
                    .map(|j| {
                        let samples: Vec<f64> = trials.iter().map(|t| t[m][j]).collect();
                        mean_and_se(&samples)
                    })
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .expect("non-empty grid");
                ToyRow { method, alpha, mean_mse: best.0, std_error: best.1 }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthSpec {
    pub groups: Vec<usize>,
    pub sizes: Vec<usize>,
    pub ks: Vec<usize>,
    pub ls: Vec<usize>,
    /// Extra `(K, L)` instances checked at `k = K`, `l = L`.
    pub boundary: Vec<(usize, usize)>,
    pub chisq_counts: Vec<usize>,
    pub chisq_dofs: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for WidthSpec {
    fn default() -> Self {
        Self {
            groups: vec![5, 10],
            sizes: vec![4, 5],
            ks: vec![1, 2],
            ls: vec![1, 2],
            boundary: vec![(1, 1), (2, 3), (3, 2)],
            chisq_counts: vec![1, 2, 10, 100],
            chisq_dofs: vec![1, 5, 20],
            trials: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    Skipped,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Skipped => "skipped",
        }
    }
}

/// `kind` is `width`, `monotone` or `chisq`. For `monotone` rows the
/// empirical column counts draws where the supremum shrank as `k` or `l`
/// grew (bound 0). For `chisq` rows `groups` is `K` and `size` is `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthRow {
    pub kind: &'static str,
    pub groups: usize,
    pub size: usize,
    pub k: usize,
    pub l: usize,
    pub empirical: f64,
    pub std_error: f64,
    pub bound: f64,
    /// Closed-form bound with `log(K/k) + l log(L/l) + 2`; informational.
    pub bound_closed: f64,
    pub status: RowStatus,
}

fn width_instance(kk: usize, ll: usize, kl: &[(usize, usize)], trials: usize, seed: u64, stream: u64) -> Vec<WidthRow> {
    let layout = match GroupLayout::contiguous(kk, ll) {
        Ok(l) => l,
        Err(_) => return Vec::new(),
    };
    let mut rng = rng_for(seed, stream);
    let mut rows = Vec::new();
    let mut samples = vec![Vec::with_capacity(trials); kl.len()];
    let mut guarded = vec![false; kl.len()];
    for (j, &(k, _)) in kl.iter().enumerate() {
        guarded[j] = ln_binomial(kk, k).exp() > ENUMERATION_GUARD;
    }
    let mut shrank = 0usize;
    for _ in 0..trials {
        let g: Array1<f64> = (0..layout.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let sups: Vec<Option<f64>> = kl
            .iter()
            .zip(&guarded)
            .map(|(&(k, l), &skip)| if skip { None } else { sup_nc_exact(&g, &layout, k, l).ok() })
            .collect();
        for (j, s) in sups.iter().enumerate() {
            if let Some(v) = s {
                samples[j].push(*v);
            }
        }
        // Per-draw monotonicity whenever (k, l) ≤ (k', l') componentwise.
        let mut bad = false;
        for a in 0..kl.len() {
            for b in 0..kl.len() {
                let le = kl[a].0 <= kl[b].0 && kl[a].1 <= kl[b].1;
                if let (true, Some(sa), Some(sb)) = (le, sups[a], sups[b]) {
                    bad |= sa > sb + 1e-12;
                }
            }
        }
        shrank += bad as usize;
    }
    for (j, &(k, l)) in kl.iter().enumerate() {
        let bound = bound_nc_counted(kk, k, ll, l).unwrap_or(f64::NAN);
        let bound_closed = bound_nc(kk, k, ll, l).unwrap_or(f64::NAN);
        let (empirical, std_error, status) = if samples[j].len() < trials {
            (f64::NAN, f64::NAN, RowStatus::Skipped)
        } else {
            let (m, se) = mean_and_se(&samples[j]);
            (m, se, if m <= bound { RowStatus::Pass } else { RowStatus::Fail })
        };
        rows.push(WidthRow {
            kind: "width",
            groups: kk,
            size: ll,
            k,
            l,
            empirical,
            std_error,
            bound,
            bound_closed,
            status,
        });
    }
    rows.push(WidthRow {
        kind: "monotone",
        groups: kk,
        size: ll,
        k: kl.iter().map(|p| p.0).max().unwrap_or(0),
        l: kl.iter().map(|p| p.1).max().unwrap_or(0),
        empirical: shrank as f64,
        std_error: 0.0,
        bound: 0.0,
        bound_closed: 0.0,
        status: if shrank == 0 { RowStatus::Pass } else { RowStatus::Fail },
    });
    rows
}

/// Groups, group size and the (k, l) pairs evaluated on that layout.
type WidthInstance = (usize, usize, Vec<(usize, usize)>);

pub fn run_width(spec: &WidthSpec) -> Result<Vec<WidthRow>> {
    if spec.trials < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 trials, got {}", spec.trials)));
    }
    let mut instances: Vec<WidthInstance> = Vec::new();
    for &kk in &spec.groups {
        for &ll in &spec.sizes {
            let kl: Vec<(usize, usize)> = spec
                .ks
                .iter()
                .flat_map(|&k| spec.ls.iter().map(move |&l| (k, l)))
                .filter(|&(k, l)| k <= kk && l <= ll)
                .collect();
            instances.push((kk, ll, kl));
        }
    }
    for &(kk, ll) in &spec.boundary {
        instances.push((kk, ll, vec![(kk, ll)]));
    }
    let mut rows: Vec<WidthRow> = instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (kk, ll, kl))| width_instance(*kk, *ll, kl, spec.trials, spec.seed, i as u64))
        .collect();
    let offset = instances.len() as u64;
    let pairs: Vec<(usize, usize)> = spec
        .chisq_counts
        .iter()
        .flat_map(|&c| spec.chisq_dofs.iter().map(move |&d| (c, d)))
        .collect();
    let chisq: Vec<Result<WidthRow>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(c, d))| {
            let check = chisq_max_check(c, d, spec.trials, &mut rng_for(spec.seed, offset + i as u64))?;
            Ok(WidthRow {
                kind: "chisq",
                groups: c,
                size: d,
                k: 0,
                l: 0,
                empirical: check.empirical_mean,
                std_error: check.std_error,
                bound: check.bound,
                bound_closed: check.bound,
                status: if check.holds() { RowStatus::Pass } else { RowStatus::Fail },
            })
        })
        .collect();
    for r in chisq {
        rows.push(r?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub table: &'static str,
    pub row: String,
    pub column: String,
    pub expected: f64,
    pub computed: f64,
    /// `equal` cells need `|Δ| ≤ 1e-3`; `at_most` cells need
    /// `computed ≤ expected + 1e-3`.
    pub relation: &'static str,
}

impl TableCell {
    pub fn delta(&self) -> f64 {
        (self.computed - self.expected).abs()
    }

    pub fn ok(&self) -> bool {
        match self.relation {
            "at_most" => self.computed <= self.expected + 1e-3,
            _ => self.delta() <= 1e-3,
        }
    }
}

fn vec10(support: &[usize], values: &[f64]) -> Array1<f64> {
    let mut x = Array1::zeros(10);
    for (&i, &v) in support.iter().zip(values) {
        x[i - 1] = v;
    }
    x
}

/// Recomputes the two worked penalty tables: three vectors on two disjoint
/// groups of five, and one vector on three overlapping groups.
pub fn penalty_tables() -> Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    let two_groups = GroupLayout::contiguous(2, 5)?;
    let singletons = GroupLayout::singletons(10)?;
    let group_only = PenaltyParams::new(0.0, 1)?;
    let both = PenaltyParams::new(1.0, 1)?;
    let rows = [
        ("{1,4,9}", vec10(&[1, 4, 9], &[3., 4., 7.]), [12.0, 14.0, 26.0]),
        ("{1,2,3,4,5}", vec10(&[1, 2, 3, 4, 5], &[2., 5., 2., 4., 5.]), [8.602, 18.0, 26.602]),
        ("{1,3,4}", vec10(&[1, 3, 4], &[3., 4., 7.]), [8.602, 14.0, 22.602]),
    ];
    for (name, x, expected) in rows {
        let computed = [
            eval_penalty(x.view(), &two_groups, &group_only, DEFAULT_TOL)?.objective,
            eval_penalty(x.view(), &singletons, &group_only, DEFAULT_TOL)?.objective,
            eval_penalty(x.view(), &two_groups, &both, DEFAULT_TOL)?.objective,
        ];
        for ((column, e), c) in ["group", "l1", "group+l1"].iter().zip(expected).zip(computed) {
            cells.push(TableCell {
                table: "1",
                row: name.to_string(),
                column: column.to_string(),
                expected: e,
                computed: c,
                relation: "equal",
            });
        }
    }

    let overlapping = GroupLayout::new(vec![(0..4).collect(), (2..7).collect(), (6..10).collect()], 10)?;
    let x = vec10(&[3, 5, 7], &[1., 1., 1.]);
    for mu in [0.1, 1.0, 10.0] {
        let h = eval_penalty(x.view(), &overlapping, &PenaltyParams::new(mu, 1)?, DEFAULT_TOL)?.objective;
        let row = format!("mu={mu}");
        cells.push(TableCell {
            table: "2",
            row: row.clone(),
            column: "optimum".into(),
            expected: 3f64.sqrt() + 3.0 * mu,
            computed: h,
            relation: "equal",
        });
        let listed = [
            ("3+5mu", 3.0 + 5.0 * mu),
            ("3+3mu", 3.0 + 3.0 * mu),
            ("1+sqrt2+3mu", 1.0 + 2f64.sqrt() + 3.0 * mu),
            ("sqrt3+3mu", 3f64.sqrt() + 3.0 * mu),
        ];
        for (column, value) in listed {
            cells.push(TableCell {
                table: "2",
                row: row.clone(),
                column: format!("<= {column}"),
                expected: value,
                computed: h,
                relation: "at_most",
            });
        }
    }
    Ok(cells)
}
