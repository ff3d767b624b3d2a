//! Proximal operators for the sparse group penalty on disjoint blocks.
//!
//! The prox of `t (‖z‖₂ + μ‖z‖₁)` on one block is elementwise soft
//! thresholding by `tμ` followed by group soft thresholding by `t`.

use ndarray::{Array1, ArrayView1, ArrayViewMut1};

use crate::error::{Error, Result};
use crate::groups::DuplicationMap;

/// Thresholds of one prox application: group shrink `eta1`, and `eta1 * mu`
/// for the elementwise part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxStep {
    pub eta1: f64,
    pub mu: f64,
}

impl ProxStep {
    pub fn new(eta1: f64, mu: f64) -> Result<Self> {
        if !(eta1 >= 0.0) || !(mu >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prox thresholds must be nonnegative (eta1 = {eta1}, mu = {mu})"
            )));
        }
        Ok(Self { eta1, mu })
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {t}")))
    }
}

pub fn soft_threshold(v: ArrayView1<f64>, t: f64) -> Result<Array1<f64>> {
    check_threshold(t)?;
    let mut out = v.to_owned();
    soft_threshold_inplace(out.view_mut(), t);
    Ok(out)
}

pub fn group_soft_threshold(v: ArrayView1<f64>, t: f64) -> Result<Array1<f64>> {
    check_threshold(t)?;
    let mut out = v.to_owned();
    group_soft_threshold_inplace(out.view_mut(), t);
    Ok(out)
}

pub(crate) fn soft_threshold_inplace(mut v: ArrayViewMut1<f64>, t: f64) {
    v.mapv_inplace(|a| a.signum() * (a.abs() - t).max(0.0));
}

pub(crate) fn group_soft_threshold_inplace(mut v: ArrayViewMut1<f64>, t: f64) {
    let norm = v.dot(&v).sqrt();
    if norm <= t {
        v.fill(0.0);
    } else {
        v *= (norm - t) / norm;
    }
}

/// Prox of `l2 ‖z‖₂ + l1 ‖z‖₁` on a single block, in place.
pub(crate) fn prox_block_inplace(mut v: ArrayViewMut1<f64>, l1: f64, l2: f64) {
    soft_threshold_inplace(v.view_mut(), l1);
    group_soft_threshold_inplace(v, l2);
}

/// Applies the composed prox blockwise over the expanded space.
pub fn prox_sparse_group(
    w: ArrayView1<f64>,
    map: &DuplicationMap,
    step: ProxStep,
) -> Result<Array1<f64>> {
    map.check_expanded(w.len())?;
    ProxStep::new(step.eta1, step.mu)?;
    let mut out = w.to_owned();
    for r in map.group_ranges() {
        prox_block_inplace(
            out.slice_mut(ndarray::s![r.clone()]),
            step.eta1 * step.mu,
            step.eta1,
        );
    }
    Ok(out)
}

/// Blockwise prox with per-group thresholds `(l2_G, l1_G)`.
pub(crate) fn prox_weighted_inplace(w: &mut Array1<f64>, map: &DuplicationMap, thresholds: &[(f64, f64)]) {
    for (r, &(l2, l1)) in map.group_ranges().iter().zip(thresholds) {
        prox_block_inplace(w.slice_mut(ndarray::s![r.clone()]), l1, l2);
    }
}
