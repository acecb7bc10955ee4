//! Dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::math;

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&max) if max > 0.0 => sv.iter().filter(|&&s| s > rel_tol * max).count(),
        _ => 0,
    }
}

/// Orthonormal basis of `{x : m x = 0}` with singular values below
/// `rel_tol * sigma_max` treated as zero.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    // pad to at least square so the SVD yields a full right basis
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if max == 0.0 || s <= rel_tol * max {
            basis.push(v_t.row(k).transpose());
        }
    }
    basis
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let sym = (h + h.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// `(positive, zero, negative)` eigenvalue counts; `|lambda| <= rel_tol * max|lambda|`
/// counts as zero.
pub fn inertia(eigenvalues: &[f64], rel_tol: f64) -> (usize, usize, usize) {
    let max = eigenvalues.iter().map(|x| math::abs(*x)).fold(0.0, f64::max);
    let zero_tol = rel_tol * max;
    let mut out = (0, 0, 0);
    for &l in eigenvalues {
        if max == 0.0 || math::abs(l) <= zero_tol {
            out.1 += 1;
        } else if l > 0.0 {
            out.0 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

/// Adjugate of a square matrix, well defined also when it is singular.
///
/// With `M = U S V^T`, `adj(M) = det(U) det(V) V adj(S) U^T` where
/// `adj(S)_ii` is the product of the other singular values.
pub fn adjugate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "adjugate needs a square matrix");
    if n == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let s = &svd.singular_values;
    let mut adj_s = DVector::zeros(n);
    for i in 0..n {
        adj_s[i] = (0..n).filter(|&j| j != i).map(|j| s[j]).product();
    }
    let sign = u.determinant() * v_t.determinant();
    let sign = if sign < 0.0 { -1.0 } else { 1.0 };
    v_t.transpose() * DMatrix::from_diagonal(&adj_s) * u.transpose() * sign
}

/// Solves `a x = b` by LU with partial pivoting; `None` if singular.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

pub fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| math::abs(*x)).fold(0.0, f64::max)
}
