//! The SOG lasso norm.
//!
//! `h(x)` is the infimum of `Σ_G (α_G ‖w_G‖₂ + β_G ‖w_G‖₁)` over all
//! decompositions `x = Σ_G w_G` with `supp(w_G) ⊆ G`. With the uniform
//! weights `α_G = 1`, `β_G = μ = λ₁ / √l` this interpolates between the
//! latent group lasso (`λ₁ = 0`) and the ℓ₁ norm (singleton groups).
//!
//! For disjoint layouts the infimum is attained by `w_G = x_G` and is
//! evaluated in closed form. For overlapping layouts it is computed with
//! ADMM in the duplicated space: the objective is separable per block there,
//! and the feasible set `{w : collapse(w) = x}` has a diagonal Gram matrix,
//! so both ADMM steps are closed-form. The scaled dual variable yields a
//! feasible point of the dual problem `max ⟨v, x⟩ s.t. max_G ν_G(v_G) ≤ 1`,
//! which gives a certified duality gap.

use ndarray::{s, Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::groups::{DuplicationMap, GroupLayout};
use crate::prox::prox_weighted_inplace;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyParams {
    lambda1: f64,
    l_target: usize,
    per_group_weights: Option<Vec<(f64, f64)>>,
}

impl PenaltyParams {
    pub fn new(lambda1: f64, l_target: usize) -> Result<Self> {
        if !(lambda1 >= 0.0) || !lambda1.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda1 must be finite and >= 0, got {lambda1}")));
        }
        if l_target == 0 {
            return Err(Error::InvalidArgument("l_target must be positive".into()));
        }
        Ok(Self {
            lambda1,
            l_target,
            per_group_weights: None,
        })
    }

    /// Explicit `(α_G, β_G)` per group, overriding the uniform `(1, μ)`.
    pub fn with_group_weights(mut self, weights: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(a, b)) = weights.iter().find(|(a, b)| !(*a > 0.0 && *b > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "group weights must be positive, got ({a}, {b})"
            )));
        }
        self.per_group_weights = Some(weights);
        Ok(self)
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn l_target(&self) -> usize {
        self.l_target
    }

    pub fn mu(&self) -> f64 {
        self.lambda1 / (self.l_target as f64).sqrt()
    }

    pub fn group_weights(&self) -> Option<&[(f64, f64)]> {
        self.per_group_weights.as_deref()
    }

    /// `(α_G, β_G)` for every group of `layout`.
    pub fn weights(&self, layout: &GroupLayout) -> Result<Vec<(f64, f64)>> {
        match &self.per_group_weights {
            Some(w) if w.len() != layout.num_groups() => Err(Error::DimensionMismatch {
                what: "group weights",
                expected: layout.num_groups(),
                got: w.len(),
            }),
            Some(w) => Ok(w.clone()),
            None => Ok(vec![(1.0, self.mu()); layout.num_groups()]),
        }
    }
}

/// A feasible decomposition of `x` into per-group blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Blocks laid out in the duplicated space.
    pub w: Array1<f64>,
    pub objective: f64,
    /// `‖collapse(w) − x‖₂`.
    pub residual: f64,
    /// Primal objective minus the best certified dual lower bound.
    pub gap: f64,
    pub iterations: usize,
}

fn l2(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

fn l1(v: ArrayView1<f64>) -> f64 {
    v.iter().map(|a| a.abs()).sum()
}

/// `Σ_G (α_G ‖w_G‖₂ + β_G ‖w_G‖₁)` for blocks in the duplicated space.
pub fn decomposition_objective(w: ArrayView1<f64>, map: &DuplicationMap, weights: &[(f64, f64)]) -> f64 {
    map.group_ranges()
        .iter()
        .zip(weights)
        .map(|(r, &(a, b))| {
            let wg = w.slice(s![r.clone()]);
            a * l2(wg) + b * l1(wg)
        })
        .sum()
}

/// Closed-form penalty for layouts without overlap.
pub fn sgl_penalty_disjoint(x: ArrayView1<f64>, layout: &GroupLayout, params: &PenaltyParams) -> Result<f64> {
    check_len(x.len(), layout)?;
    if !layout.is_disjoint() {
        return Err(Error::OverlappingLayout(layout.max_overlap()));
    }
    let weights = params.weights(layout)?;
    Ok(layout
        .groups()
        .iter()
        .zip(&weights)
        .map(|(g, &(a, b))| {
            let xg: Array1<f64> = g.iter().map(|&i| x[i]).collect();
            a * l2(xg.view()) + b * l1(xg.view())
        })
        .sum())
}

/// Dual norm of `α‖·‖₂ + β‖·‖₁` at `c`: the smallest `s ≥ 0` with
/// `‖S_{sβ}(c)‖₂ ≤ sα`, where `S` is soft thresholding.
pub fn group_dual_norm(c: ArrayView1<f64>, alpha: f64, beta: f64) -> f64 {
    let excess = |s: f64| {
        let t = s * beta;
        c.iter().map(|v| (v.abs() - t).max(0.0).powi(2)).sum::<f64>().sqrt() - s * alpha
    };
    let mut hi = l2(c) / alpha;
    if hi == 0.0 {
        return 0.0;
    }
    if beta > 0.0 {
        hi = hi.min(c.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / beta);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Dual norm of `h`: the maximum of the per-group dual norms.
pub fn dual_norm(c: ArrayView1<f64>, layout: &GroupLayout, params: &PenaltyParams) -> Result<f64> {
    check_len(c.len(), layout)?;
    let weights = params.weights(layout)?;
    Ok(layout
        .groups()
        .iter()
        .zip(&weights)
        .map(|(g, &(a, b))| {
            let cg: Array1<f64> = g.iter().map(|&i| c[i]).collect();
            group_dual_norm(cg.view(), a, b)
        })
        .fold(0.0, f64::max))
}

/// Evaluates `h(x)` with the default iteration budget.
pub fn eval_penalty(
    x: ArrayView1<f64>,
    layout: &GroupLayout,
    params: &PenaltyParams,
    tol: f64,
) -> Result<Decomposition> {
    eval_penalty_with(x, layout, params, tol, DEFAULT_MAX_ITERS)
}

pub fn eval_penalty_with(
    x: ArrayView1<f64>,
    layout: &GroupLayout,
    params: &PenaltyParams,
    tol: f64,
    max_iters: usize,
) -> Result<Decomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    check_len(x.len(), layout)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("penalty argument".into()));
    }
    let map = DuplicationMap::new(layout);
    let weights = params.weights(layout)?;

    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(Decomposition {
            w: Array1::zeros(map.expanded_dim()),
            objective: 0.0,
            residual: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }
    if layout.is_disjoint() {
        let w = map.replicate(x)?;
        let objective = decomposition_objective(w.view(), &map, &weights);
        return Ok(Decomposition {
            w,
            objective,
            residual: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }

    // Work on x / scale; h is positively homogeneous.
    let xn = x.mapv(|v| v / scale);
    let tol_n = tol / scale;
    let mult: Vec<f64> = map.multiplicity().iter().map(|&m| m as f64).collect();
    let project = |v: &mut Array1<f64>| {
        let mut excess = map.collapse(v.view()).expect("expanded length");
        excess -= &xn;
        for (e, m) in excess.iter_mut().zip(&mult) {
            *e /= m;
        }
        for (vj, slot) in v.iter_mut().zip(map.slots()) {
            *vj -= excess[slot.original];
        }
    };

    let mut z = map.embed_first(xn.view())?;
    project(&mut z);
    let mut u: Array1<f64> = Array1::zeros(map.expanded_dim());
    let mut rho = 1.0;
    let mut thresholds: Vec<(f64, f64)> = weights.iter().map(|&(a, b)| (a / rho, b / rho)).collect();

    let mut best_z = z.clone();
    let mut best_upper = decomposition_objective(z.view(), &map, &weights);
    let mut best_lower = f64::NEG_INFINITY;
    let mut w;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        w = &z - &u;
        prox_weighted_inplace(&mut w, &map, &thresholds);
        let z_prev = z.clone();
        z = &w + &u;
        project(&mut z);
        u = &u + &w - &z;

        if iterations % 10 == 0 || iterations == 1 {
            for cand in [restrict_to_support(&w, &map, xn.view()), Some(z.clone())].into_iter().flatten() {
                let upper = decomposition_objective(cand.view(), &map, &weights);
                if upper < best_upper {
                    best_upper = upper;
                    best_z = cand;
                }
            }
            // u lies in the range of the replication operator, so every copy of
            // coordinate i carries the same dual value.
            let v = map.collapse(u.view())?;
            let v: Array1<f64> = v.iter().zip(&mult).map(|(a, m)| -rho * a / m).collect();
            let dn = dual_norm(v.view(), layout, params)?;
            if dn > 0.0 {
                let lower = v.dot(&xn) / dn.max(1.0);
                best_lower = best_lower.max(lower);
            }
            if best_upper - best_lower <= tol_n {
                break;
            }

            let r = l2((&w - &z).view());
            let sres = rho * l2((&z - &z_prev).view());
            let new_rho = if r > 10.0 * sres {
                rho * 2.0
            } else if sres > 10.0 * r {
                rho / 2.0
            } else {
                rho
            };
            if new_rho != rho {
                u *= rho / new_rho;
                rho = new_rho;
                thresholds = weights.iter().map(|&(a, b)| (a / rho, b / rho)).collect();
            }
        }
    }

    let gap = (best_upper - best_lower).max(0.0) * scale;
    let w = best_z.mapv(|v| v * scale);
    let residual = l2((map.collapse(w.view())? - x).view());
    if gap > tol {
        return Err(Error::PenaltyNotConverged {
            iterations,
            gap,
            best: w,
            residual,
        });
    }
    Ok(Decomposition {
        objective: best_upper * scale,
        w,
        residual,
        gap,
        iterations,
    })
}

/// Makes a prox iterate exactly feasible by spreading the residual over its
/// nonzero slots only, which keeps inactive blocks at zero. Returns `None`
/// when some nonzero coordinate of `x` has no nonzero slot.
fn restrict_to_support(w: &Array1<f64>, map: &DuplicationMap, x: ArrayView1<f64>) -> Option<Array1<f64>> {
    let mut count = vec![0usize; map.original_dim()];
    let mut excess = x.mapv(|v| -v);
    for (slot, &v) in map.slots().iter().zip(w.iter()) {
        if v != 0.0 {
            count[slot.original] += 1;
            excess[slot.original] += v;
        }
    }
    if count.iter().zip(x.iter()).any(|(&c, &xi)| c == 0 && xi != 0.0) {
        return None;
    }
    let mut out = w.clone();
    for (o, slot) in out.iter_mut().zip(map.slots()) {
        if *o != 0.0 {
            *o -= excess[slot.original] / count[slot.original] as f64;
        }
    }
    Some(out)
}

/// `√k (1 + λ₁) ‖x‖₂`, an upper bound on `h(x)` for `(k, l)`-group-sparse `x`.
pub fn penalty_upper_bound_klsparse(x: ArrayView1<f64>, params: &PenaltyParams, k: usize) -> f64 {
    (k as f64).sqrt() * (1.0 + params.lambda1()) * l2(x)
}

/// Threshold below which a block is treated as inactive.
pub fn activity_threshold(x: ArrayView1<f64>) -> f64 {
    1e-8 * l2(x).max(1.0)
}

/// Number of groups whose block in `decomposition` is nonzero.
pub fn group_l0(x: ArrayView1<f64>, layout: &GroupLayout, decomposition: &Decomposition) -> usize {
    let map = DuplicationMap::new(layout);
    let thr = activity_threshold(x);
    map.group_ranges()
        .iter()
        .filter(|r| l2(decomposition.w.slice(s![(*r).clone()])) > thr)
        .count()
}

fn check_len(len: usize, layout: &GroupLayout) -> Result<()> {
    if len != layout.dim() {
        return Err(Error::DimensionMismatch {
            what: "penalty argument",
            expected: layout.dim(),
            got: len,
        });
    }
    Ok(())
}
