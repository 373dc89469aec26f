//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything works on `nalgebra` dynamic matrices. Subspaces are stored as
//! matrices whose *columns* are coordinate vectors of an orthonormal basis.

use nalgebra::{DMatrix, DVector};

/// Frobenius norm of the commutator-style residual `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// Gram–Schmidt orthonormalisation of the columns of `v` with respect to the
/// Euclidean inner product, dropping columns whose residual norm falls below
/// `tol`. Deterministic: columns are processed left to right.
pub fn gram_schmidt(v: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = v.nrows();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..v.ncols() {
        let mut w = v.column(j).clone_owned();
        for c in &cols {
            let p = c.dot(&w);
            w -= c * p;
        }
        // second pass for numerical stability
        for c in &cols {
            let p = c.dot(&w);
            w -= c * p;
        }
        let nrm = w.norm();
        if nrm > tol {
            cols.push(w / nrm);
        }
    }
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `sub` (columns
/// orthonormal) inside R^n, built deterministically from the identity basis.
pub fn orthogonal_complement(sub: &DMatrix<f64>, n: usize, tol: f64) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = (0..sub.ncols()).map(|j| sub.column(j).clone_owned()).collect();
    let mut comp: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut w = DVector::zeros(n);
        w[i] = 1.0;
        for c in cols.iter().chain(comp.iter()) {
            let p = c.dot(&w);
            w -= c * p;
        }
        for c in cols.iter().chain(comp.iter()) {
            let p = c.dot(&w);
            w -= c * p;
        }
        let nrm = w.norm();
        if nrm > tol {
            comp.push(w.clone() / nrm);
        }
        if cols.len() + comp.len() == n {
            break;
        }
    }
    let mut out = DMatrix::zeros(n, comp.len());
    for (j, c) in comp.iter().enumerate() {
        out.set_column(j, c);
    }
    let _ = cols.drain(..);
    out
}

/// Orthonormal basis of the null space of `a` (vectors `v` with `a v = 0`),
/// detected via SVD with singular values below `tol`.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("svd v_t");
    let mut cols = Vec::new();
    for i in 0..vt.nrows() {
        let sv = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if sv < tol {
            cols.push(vt.row(i).transpose());
        }
    }
    let mut out = DMatrix::zeros(a.ncols(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Smallest singular value of `a`.
pub fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Dimension of the null space of `a` at tolerance `tol`.
pub fn nullity(a: &DMatrix<f64>, tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s < tol).count()
        + a.ncols().saturating_sub(svd.singular_values.len())
}

/// Eigenvector of the real eigenvalue `lambda` of the (not necessarily
/// symmetric) matrix `a`, via the null space of `a - lambda I`. Returns a
/// unit vector, or `None` when the null space is empty at tolerance `tol`.
pub fn real_eigenvector(a: &DMatrix<f64>, lambda: f64, tol: f64) -> Option<DVector<f64>> {
    let n = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n, n) * lambda;
    let ns = null_space(&shifted, tol);
    if ns.ncols() == 0 {
        None
    } else {
        Some(ns.column(0).clone_owned())
    }
}

/// Snap values below `tol` in absolute value to exactly zero.
pub fn snap(x: f64, tol: f64) -> f64 {
    if x.abs() < tol {
        0.0
    } else {
        x
    }
}
