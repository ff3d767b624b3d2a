//! Synthetic data: group-sparse ground truth, Gaussian designs and labels.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::groups::GroupLayout;
use crate::linalg;

pub type SimRng = ChaCha8Rng;

/// Deterministic RNG stream for `(seed, stream)`, e.g. one stream per trial.
pub fn rng_for(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationModel {
    /// `P(y = 1) = e^{βu} / (1 + e^{βu})`.
    Logistic { beta: f64 },
    /// `y = sign(u)`, with `sign(0) = +1`.
    Sign,
    /// `y = u + N(0, σ²)`.
    Linear { sigma_noise: f64 },
}

impl ObservationModel {
    pub fn logistic(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("logistic beta must be positive, got {beta}")));
        }
        Ok(Self::Logistic { beta })
    }

    pub fn linear(sigma_noise: f64) -> Result<Self> {
        if !(sigma_noise >= 0.0 && sigma_noise.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {sigma_noise}")));
        }
        Ok(Self::Linear { sigma_noise })
    }

    pub fn is_classification(&self) -> bool {
        !matches!(self, Self::Linear { .. })
    }

    /// `E[y | u]` for this model.
    pub fn link(&self, u: f64) -> f64 {
        match *self {
            Self::Logistic { beta } => (0.5 * beta * u).tanh(),
            Self::Sign => sign(u),
            Self::Linear { .. } => u,
        }
    }
}

fn sign(u: f64) -> f64 {
    if u >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub x_star: Array1<f64>,
    pub active_groups: Vec<usize>,
    /// Coordinates drawn inside each active group.
    pub per_group_support: BTreeMap<usize, Vec<usize>>,
}

impl GroundTruth {
    pub fn support(&self) -> Vec<usize> {
        self.x_star
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Draws a unit-norm `(k, l)`-group-sparse vector: `k` groups uniformly
/// without replacement, `min(l, |G|)` coordinates uniformly inside each,
/// values uniform on `[-1, 1]` (summed where supports collide).
pub fn gen_ground_truth<R: Rng + ?Sized>(layout: &GroupLayout, k: usize, l: usize, rng: &mut R) -> Result<GroundTruth> {
    if k == 0 || k > layout.num_groups() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= K = {}, got k = {k}",
            layout.num_groups()
        )));
    }
    if l == 0 || l > layout.max_group_size() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= l <= L = {}, got l = {l}",
            layout.max_group_size()
        )));
    }
    let mut x: Array1<f64> = Array1::zeros(layout.dim());
    let mut active_groups: Vec<usize> = sample(rng, layout.num_groups(), k).into_vec();
    active_groups.sort_unstable();
    let mut per_group_support = BTreeMap::new();
    for &g in &active_groups {
        let group = layout.group(g);
        let mut chosen: Vec<usize> = sample(rng, group.len(), l.min(group.len()))
            .into_iter()
            .map(|j| group[j])
            .collect();
        chosen.sort_unstable();
        for &i in &chosen {
            x[i] += rng.random_range(-1.0..=1.0);
        }
        per_group_support.insert(g, chosen);
    }
    let norm = x.dot(&x).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("drawn ground truth is zero".into()));
    }
    x /= norm;
    Ok(GroundTruth {
        x_star: x,
        active_groups,
        per_group_support,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    Identity,
    Explicit(Array2<f64>),
    /// `Σ_ij = ρ^{|i−j|}`.
    Ar1(f64),
}

impl Covariance {
    pub fn matrix(&self, p: usize) -> Array2<f64> {
        match self {
            Self::Identity => Array2::eye(p),
            Self::Explicit(s) => s.clone(),
            Self::Ar1(rho) => Array2::from_shape_fn((p, p), |(i, j)| rho.powi(i.abs_diff(j) as i32)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub n: usize,
    pub p: usize,
    pub covariance: Covariance,
    pub seed: u64,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        match &self.covariance {
            Covariance::Ar1(rho) if !(rho.abs() < 1.0) => {
                Err(Error::InvalidArgument(format!("AR(1) coefficient must lie in (-1, 1), got {rho}")))
            }
            Covariance::Explicit(s) if s.dim() != (self.p, self.p) => Err(Error::DimensionMismatch {
                what: "covariance size",
                expected: self.p,
                got: s.nrows(),
            }),
            _ => Ok(()),
        }
    }

    pub fn condition_number(&self) -> Result<f64> {
        self.validate()?;
        match self.covariance {
            Covariance::Identity => Ok(1.0),
            _ => linalg::condition_number(self.covariance.matrix(self.p).view()),
        }
    }
}

/// Rows i.i.d. `N(0, Σ)`, drawn as standard normal rows times `Σ^{1/2}`.
pub fn gen_design<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<Array2<f64>> {
    spec.validate()?;
    let root = match spec.covariance {
        Covariance::Identity => None,
        _ => Some(linalg::sym_sqrt(spec.covariance.matrix(spec.p).view())?),
    };
    let z = Array2::from_shape_simple_fn((spec.n, spec.p), || rng.sample::<f64, _>(StandardNormal));
    Ok(match root {
        None => z,
        Some(r) => z.dot(&r),
    })
}

pub fn gen_labels<R: Rng + ?Sized>(
    phi: ArrayView2<f64>,
    x_star: ArrayView1<f64>,
    model: ObservationModel,
    rng: &mut R,
) -> Result<Array1<f64>> {
    if phi.ncols() != x_star.len() {
        return Err(Error::DimensionMismatch {
            what: "x* length",
            expected: phi.ncols(),
            got: x_star.len(),
        });
    }
    if model.is_classification() {
        let norm = x_star.dot(&x_star).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitNorm(norm));
        }
    }
    let u = phi.dot(&x_star);
    Ok(match model {
        ObservationModel::Sign => u.mapv(sign),
        ObservationModel::Logistic { beta } => u.mapv(|u| {
            let p = 1.0 / (1.0 + (-beta * u).exp());
            if rng.random::<f64>() < p {
                1.0
            } else {
                -1.0
            }
        }),
        ObservationModel::Linear { sigma_noise } => {
            u.mapv(|u| u + sigma_noise * rng.sample::<f64, _>(StandardNormal))
        }
    })
}

pub const DEFAULT_QUADRATURE_POINTS: usize = 128;

/// `σ_f = 1 / E[f(g) g]` for `g ~ N(0, 1)`.
pub fn sigma_f(model: ObservationModel, quadrature_points: usize) -> Result<f64> {
    match model {
        ObservationModel::Sign => Ok((PI / 2.0).sqrt()),
        ObservationModel::Linear { .. } => Err(Error::InvalidArgument(
            "sigma_f is defined for classification models only".into(),
        )),
        ObservationModel::Logistic { beta } => {
            if quadrature_points < 64 {
                return Err(Error::InvalidArgument(format!(
                    "need at least 64 quadrature nodes, got {quadrature_points}"
                )));
            }
            let corr = if beta <= 1.0 {
                let (nodes, weights) = linalg::gauss_hermite(quadrature_points);
                nodes.iter().zip(&weights).map(|(&g, &w)| w * model.link(g) * g).sum()
            } else {
                // For steep links the Hermite rule cannot resolve the kink at 0.
                // Write E[tanh(βg/2) g] = E|g| − E[2|g| / (1 + e^{β|g|})] and
                // integrate the correction in v = β|g| against e^{-v}.
                let (nodes, weights) = linalg::gauss_laguerre(quadrature_points);
                let density = |u: f64| (-0.5 * u * u).exp() / (2.0 * PI).sqrt();
                let correction: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&v, &w)| w * v / (1.0 + (-v).exp()) * density(v / beta))
                    .sum::<f64>()
                    * 4.0
                    / (beta * beta);
                (2.0 / PI).sqrt() - correction
            };
            if !(corr > 0.0) {
                return Err(Error::NonPositiveCorrelation(corr));
            }
            Ok(1.0 / corr)
        }
    }
}
