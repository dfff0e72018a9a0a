//! Thin wrappers around the dense solvers used throughout the crate.
//!
//! Everything funnels through faer, which is backward stable to well below
//! 1e-12 on the matrix orders (<= 162) that appear here.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::qstate::ComplexMatrix;

pub(crate) fn to_faer(m: &ComplexMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.n_rows(), m.n_cols(), |i, j| m.get(i, j))
}

pub(crate) fn from_faer(m: &Mat<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| *m.get(i, j))
}

/// Eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// ascending order and the matrix whose columns are the eigenvectors.
pub fn herm_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let evd = to_faer(m)
        .self_adjoint_eigen(Side::Lower)
        .expect("hermitian eigendecomposition failed to converge");
    let s = evd.S().column_vector();
    let vals: Vec<f64> = (0..m.n_rows()).map(|i| s[i].re).collect();
    (vals, from_faer(&evd.U().to_owned()))
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let evd = to_faer(m)
        .self_adjoint_eigen(Side::Lower)
        .expect("hermitian eigendecomposition failed to converge");
    let s = evd.S().column_vector();
    (0..m.n_rows()).map(|i| s[i].re).collect()
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let svd = to_faer(m)
        .svd()
        .expect("singular value decomposition failed to converge");
    let s = svd.S().column_vector();
    (0..m.n_rows().min(m.n_cols())).map(|i| s[i].re).collect()
}

/// Full singular value decomposition `A = U diag(s) V^dagger`.
pub fn svd_full(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let svd = to_faer(m)
        .svd()
        .expect("singular value decomposition failed to converge");
    let s = svd.S().column_vector();
    let vals: Vec<f64> = (0..m.n_rows().min(m.n_cols())).map(|i| s[i].re).collect();
    (
        from_faer(&svd.U().to_owned()),
        vals,
        from_faer(&svd.V().to_owned()),
    )
}

/// Eigenvalues of a general (not necessarily Hermitian) square matrix.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    to_faer(m)
        .eigenvalues()
        .expect("eigendecomposition failed to converge")
}
