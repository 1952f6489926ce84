//! Small dense linear-algebra helpers shared by the likelihood and the sampler.

use nalgebra::{Cholesky, DMatrix, Dyn};

/// Pivots smaller than this in magnitude mark a matrix as singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// `ln |det(m)|` through partial-pivoting LU, or `None` when a pivot falls
/// below [`SINGULAR_PIVOT`].
pub fn log_abs_det(m: &DMatrix<f64>) -> Option<f64> {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        let piv = u[(i, i)].abs();
        if piv.is_nan() || piv < SINGULAR_PIVOT {
            return None;
        }
        acc += piv.ln();
    }
    Some(acc)
}

/// Inverse through LU, `None` on a singular pivot.
pub fn inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    log_abs_det(m)?;
    m.clone().try_inverse()
}

pub fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let chol = Cholesky::new(m.clone())?;
    if chol.l_dirty().diagonal().iter().any(|d| d.is_nan() || *d <= 0.0) {
        return None;
    }
    Some(chol)
}

pub fn chol_log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Inverse of a symmetric positive definite matrix, symmetrized.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = cholesky(m)?.inverse();
    Some(symmetrize(&inv))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// `tr(a * b)` without forming the product.
pub fn trace_of_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Delete row and column `j` from a square matrix.
pub fn minor(m: &DMatrix<f64>, j: usize) -> DMatrix<f64> {
    m.clone().remove_row(j).remove_column(j)
}

/// Column `j` of `m` without its `j`-th entry.
pub fn column_without(m: &DMatrix<f64>, j: usize) -> nalgebra::DVector<f64> {
    let mut out = nalgebra::DVector::zeros(m.nrows() - 1);
    let mut r = 0;
    for i in 0..m.nrows() {
        if i != j {
            out[r] = m[(i, j)];
            r += 1;
        }
    }
    out
}
