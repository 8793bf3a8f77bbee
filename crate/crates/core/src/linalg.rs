//! Small dense helpers shared by the numeric modules.

use nalgebra::{DMatrix, DVector};

/// Orthonormal basis (columns) of the column space of `a`, dropping singular
/// values at or below `tol`.
pub fn column_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return DMatrix::zeros(m, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: alloc::vec::Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    DMatrix::from_fn(m, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of `{x : a·x = 0}` (columns); eigenvalues of `aᵀa` at or
/// below `tol` count as zero.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // Row space complement: eigenvectors of aᵀa with small eigenvalues.
    let eig = (a.transpose() * a).symmetric_eigen();
    let keep: alloc::vec::Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() <= tol)
        .collect();
    DMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Frobenius distance test with early exit.
pub fn frobenius_within(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    let tol2 = tol * tol;
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        acc += d * d;
        if acc >= tol2 {
            return false;
        }
    }
    true
}

/// `min_β ‖A β − b‖`.
pub fn least_squares_residual(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    if a.ncols() == 0 {
        return b.norm();
    }
    let q = column_space(a, 1e-12 * (1.0 + a.norm()));
    let proj = &q * (q.transpose() * b);
    (b - proj).norm()
}

/// Nearest orthogonal matrix `U·Vᵀ` from the SVD, with the smallest singular value.
pub fn polar_orthogonal(a: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    (u * vt, smin)
}

/// Projects `v` off the span of the orthonormal columns of `q`.
pub fn project_out(q: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}
