//! Monte-Carlo checks of the mean-width and chi-square bounds.
//!
//! `C_nc` is the set of unit-ball vectors that are `(k, l)`-group sparse.
//! For a fixed Gaussian draw `g`, `sup_{x ∈ C_nc} ⟨x, g⟩` is the largest
//! `‖g_S‖₂` over admissible supports `S`.

use itertools::Itertools;
use ndarray::Array1;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::groups::GroupLayout;
use crate::penalty::{eval_penalty, PenaltyParams, DEFAULT_TOL};
use crate::simulate::gen_ground_truth;

/// Largest number of group subsets [`width_nc_exact`] will enumerate.
pub const ENUMERATION_GUARD: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMaxMethod {
    ExactEnumeration,
    /// Sum of the `k` largest per-group top-`l` energies. Exact for
    /// disjoint groups, an upper bound when groups overlap.
    GreedyUpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub inner_max_method: InnerMaxMethod,
}

pub(crate) fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `ln C(n, r)`.
pub fn ln_binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    let r = r.min(n - r);
    (1..=r).map(|i| ((n - r + i) as f64 / i as f64).ln()).sum()
}

/// Sum of the `l` largest `g_i²` inside each group.
pub fn group_energies(g: &Array1<f64>, layout: &GroupLayout, l: usize) -> Vec<f64> {
    layout
        .groups()
        .iter()
        .map(|grp| {
            let mut sq: Vec<f64> = grp.iter().map(|&i| g[i] * g[i]).collect();
            sq.sort_by(|a, b| b.total_cmp(a));
            sq.iter().take(l).sum()
        })
        .collect()
}

fn check_kl(layout: &GroupLayout, k: usize, l: usize) -> Result<()> {
    if k == 0 || k > layout.num_groups() || l == 0 || l > layout.max_group_size() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= K = {} and 1 <= l <= L = {} (got k = {k}, l = {l})",
            layout.num_groups(),
            layout.max_group_size()
        )));
    }
    Ok(())
}

/// `sup_{x ∈ C_nc} ⟨x, g⟩` by enumerating every `k`-subset of groups.
/// Disjoint layouts only.
pub fn sup_nc_exact(g: &Array1<f64>, layout: &GroupLayout, k: usize, l: usize) -> Result<f64> {
    check_kl(layout, k, l)?;
    if !layout.is_disjoint() {
        return Err(Error::OverlappingLayout(layout.max_overlap()));
    }
    let count = ln_binomial(layout.num_groups(), k).exp();
    if count > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge(count));
    }
    let energy = group_energies(g, layout, l);
    let best = (0..layout.num_groups())
        .combinations(k)
        .map(|c| c.iter().map(|&i| energy[i]).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(best.sqrt())
}

/// Greedy bound on the same supremum: the `k` largest group energies.
pub fn sup_nc_greedy(g: &Array1<f64>, layout: &GroupLayout, k: usize, l: usize) -> Result<f64> {
    check_kl(layout, k, l)?;
    let mut energy = group_energies(g, layout, l);
    energy.sort_by(|a, b| b.total_cmp(a));
    Ok(energy.iter().take(k).sum::<f64>().sqrt())
}

fn standard_normal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Array1<f64> {
    (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        return Err(Error::InvalidArgument(format!("need at least {min} trials, got {trials}")));
    }
    Ok(())
}

/// Monte-Carlo `ω(C_nc)` with the exact inner supremum (disjoint groups).
pub fn width_nc_exact<R: Rng + ?Sized>(
    layout: &GroupLayout,
    k: usize,
    l: usize,
    trials: usize,
    rng: &mut R,
) -> Result<WidthEstimate> {
    check_trials(trials, 30)?;
    // Fail on the guard before drawing anything.
    sup_nc_exact(&Array1::zeros(layout.dim()), layout, k, l)?;
    let samples = (0..trials)
        .map(|_| sup_nc_exact(&standard_normal(layout.dim(), rng), layout, k, l))
        .collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&samples);
    Ok(WidthEstimate {
        mean,
        std_error,
        trials,
        inner_max_method: InnerMaxMethod::ExactEnumeration,
    })
}

/// Monte-Carlo upper estimate of `ω(C_nc)` for any layout.
pub fn width_nc_greedy<R: Rng + ?Sized>(
    layout: &GroupLayout,
    k: usize,
    l: usize,
    trials: usize,
    rng: &mut R,
) -> Result<WidthEstimate> {
    check_trials(trials, 30)?;
    let samples = (0..trials)
        .map(|_| sup_nc_greedy(&standard_normal(layout.dim(), rng), layout, k, l))
        .collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&samples);
    Ok(WidthEstimate {
        mean,
        std_error,
        trials,
        inner_max_method: InnerMaxMethod::GreedyUpperBound,
    })
}

fn check_bound_args(groups: usize, k: usize, max_size: usize, l: usize) -> Result<()> {
    if k == 0 || k > groups || l == 0 || l > max_size {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= K and 1 <= l <= L (got K = {groups}, k = {k}, L = {max_size}, l = {l})"
        )));
    }
    Ok(())
}

/// `(√(k [ln(K/k) + l ln(L/l) + 2]) + √(kl))²`.
pub fn bound_nc(groups: usize, k: usize, max_size: usize, l: usize) -> Result<f64> {
    check_bound_args(groups, k, max_size, l)?;
    let (kk, kf, lf, ll) = (groups as f64, k as f64, max_size as f64, l as f64);
    let log_count = kf * ((kk / kf).ln() + ll * (lf / ll).ln() + 2.0);
    Ok((log_count.sqrt() + (kf * ll).sqrt()).powi(2))
}

/// `ln |S|` with `|S| = C(K, k) · C(kL, kl)`.
pub fn log_support_count(groups: usize, k: usize, max_size: usize, l: usize) -> Result<f64> {
    check_bound_args(groups, k, max_size, l)?;
    Ok(ln_binomial(groups, k) + ln_binomial(k * max_size, k * l))
}

/// `(√ln|S| + √(kl))²` with the exact support count.
pub fn bound_nc_counted(groups: usize, k: usize, max_size: usize, l: usize) -> Result<f64> {
    let log_count = log_support_count(groups, k, max_size, l)?;
    Ok((log_count.sqrt() + ((k * l) as f64).sqrt()).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChisqCheck {
    pub empirical_mean: f64,
    pub std_error: f64,
    pub bound: f64,
}

impl ChisqCheck {
    /// The bound is not exceeded beyond three standard errors.
    pub fn holds(&self) -> bool {
        self.empirical_mean - 3.0 * self.std_error <= self.bound
    }
}

/// `E[max of K i.i.d. χ²_d]` by simulation, against `(√(2 ln K) + √d)²`.
pub fn chisq_max_check<R: Rng + ?Sized>(count: usize, dof: usize, trials: usize, rng: &mut R) -> Result<ChisqCheck> {
    check_trials(trials, 1000)?;
    if count == 0 || dof == 0 {
        return Err(Error::InvalidArgument("K and d must be positive".into()));
    }
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            (0..count)
                .map(|_| (0..dof).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .collect();
    let (empirical_mean, std_error) = mean_and_se(&samples);
    let bound = ((2.0 * (count as f64).ln()).sqrt() + (dof as f64).sqrt()).powi(2);
    Ok(ChisqCheck {
        empirical_mean,
        std_error,
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationReport {
    /// Largest `h(x) / (√k (1 + λ₁) ‖x‖₂)` over the sampled vectors.
    pub worst_ratio: f64,
    /// Same ratio at the equal-entries vector on `k` disjoint groups
    /// (`None` when the layout overlaps or has groups smaller than `l`).
    pub witness_ratio: Option<f64>,
}

pub fn relaxation_check<R: Rng + ?Sized>(
    layout: &GroupLayout,
    k: usize,
    l: usize,
    params: &PenaltyParams,
    trials: usize,
    rng: &mut R,
) -> Result<RelaxationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    check_kl(layout, k, l)?;
    let scale = (k as f64).sqrt() * (1.0 + params.lambda1());
    let ratio = |x: &Array1<f64>| -> Result<f64> {
        let h = eval_penalty(x.view(), layout, params, DEFAULT_TOL)?.objective;
        Ok(h / (scale * x.dot(x).sqrt()))
    };
    let mut worst_ratio = 0.0_f64;
    for _ in 0..trials {
        let truth = gen_ground_truth(layout, k, l, rng)?;
        worst_ratio = worst_ratio.max(ratio(&truth.x_star)?);
    }

    let witness_groups: Vec<usize> = (0..layout.num_groups()).filter(|&g| layout.group(g).len() >= l).take(k).collect();
    let witness_ratio = if layout.is_disjoint() && witness_groups.len() == k {
        let mut x = Array1::zeros(layout.dim());
        let v = 1.0 / ((k * l) as f64).sqrt();
        for &g in &witness_groups {
            for &i in &layout.group(g)[..l] {
                x[i] = v;
            }
        }
        Some(ratio(&x)?)
    } else {
        None
    };
    Ok(RelaxationReport {
        worst_ratio,
        witness_ratio,
    })
}
