//! Dense linear algebra helpers backed by nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

pub(crate) fn to_na(a: ArrayView2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn from_na(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Symmetric square root of a positive definite matrix. Eigenvalues below
/// `1e-12` (relative to the largest) are rejected.
pub fn sym_sqrt(sigma: ArrayView2<f64>) -> Result<Array2<f64>> {
    let (vals, vecs) = sym_eigen(sigma)?;
    let max = vals.iter().cloned().fold(0.0_f64, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 1e-12 * max.max(1.0)) {
        return Err(Error::NotPositiveDefinite(min));
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| v.sqrt())));
    Ok(from_na(&(&vecs * d * vecs.transpose())))
}

/// Inverse symmetric square root, for whitening.
pub fn sym_inv_sqrt(sigma: ArrayView2<f64>) -> Result<Array2<f64>> {
    let (vals, vecs) = sym_eigen(sigma)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 1e-12) {
        return Err(Error::NotPositiveDefinite(min));
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| 1.0 / v.sqrt())));
    Ok(from_na(&(&vecs * d * vecs.transpose())))
}

/// Condition number of a symmetric positive definite matrix.
pub fn condition_number(sigma: ArrayView2<f64>) -> Result<f64> {
    let (vals, _) = sym_eigen(sigma)?;
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(max / min)
}

fn sym_eigen(sigma: ArrayView2<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let (r, c) = sigma.dim();
    if r != c {
        return Err(Error::DimensionMismatch {
            what: "covariance columns",
            expected: r,
            got: c,
        });
    }
    for i in 0..r {
        for j in 0..i {
            let (a, b) = (sigma[[i, j]], sigma[[j, i]]);
            if (a - b).abs() > 1e-10 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::InvalidArgument(format!(
                    "covariance is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let eig = SymmetricEigen::new(to_na(sigma));
    Ok((eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors))
}

/// Minimum-norm least squares solution of `a x ≈ b`, plus a flag that is
/// set when `a` is numerically rank deficient.
pub fn min_norm_lstsq(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Result<(Array1<f64>, bool)> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "least squares rows",
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let n = a.ncols();
    if n == 0 {
        return Ok((Array1::zeros(0), false));
    }
    if a.nrows() == 0 {
        return Ok((Array1::zeros(n), true));
    }
    let svd = to_na(a).svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let eps = smax * (a.nrows().max(n) as f64) * f64::EPSILON * 16.0;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let bb = DVector::from_iterator(b.len(), b.iter().cloned());
    let x = svd.solve(&bb, eps).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((x.iter().cloned().collect(), rank < n))
}

/// Estimates `‖a‖₂²` by power iteration on `aᵀa`.
pub fn spectral_norm_sq(a: ArrayView2<f64>, iters: usize) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start with no component that is exactly orthogonal by symmetry.
    let mut v: Array1<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
    let norm = v.dot(&v).sqrt();
    v /= norm;
    let mut est = 0.0;
    for _ in 0..iters {
        let av = a.dot(&v);
        let mut w = a.t().dot(&av);
        let nw = w.dot(&w).sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        est = nw;
        w /= nw;
        v = w;
    }
    est
}

/// Nodes and weights for `E[f(g)]`, `g ~ N(0, 1)`, by Golub–Welsch on the
/// probabilists' Hermite recurrence. Weights sum to one.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(x, w)| (x, w / total)).unzip()
}

/// Nodes and weights for `∫₀^∞ e^{-v} f(v) dv` (Gauss–Laguerre, Golub–Welsch).
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i + 1 == j || j + 1 == i {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
