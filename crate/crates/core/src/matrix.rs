//! Internal dense complex-matrix helpers on top of `faer`.

use faer::Mat;
use num_complex::Complex64 as C64;

pub(crate) type CMat = Mat<C64>;

/// Conjugate transpose as an owned matrix.
pub(crate) fn dagger(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

/// Largest absolute entry.
pub(crate) fn max_abs(a: &CMat) -> f64 {
    a.norm_max()
}

/// Largest singular value (operator 2-norm).
pub(crate) fn spectral_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let sv = a
        .singular_values()
        .expect("singular value decomposition failed");
    sv.first().copied().unwrap_or(0.0)
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and a unitary
/// eigenvector matrix with eigenvectors in columns.
pub(crate) fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("hermitian eigendecomposition failed");
    let s = evd.S();
    let evals = (0..a.nrows()).map(|i| s[i].re).collect();
    (evals, evd.U().to_owned())
}

/// `max |a_ij - b_ij|`.
pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let d = (a[(i, j)] - b[(i, j)]).norm();
            if d > m {
                m = d;
            }
        }
    }
    m
}

/// Hermiticity defect `max |a_ij - conj(a_ji)|`.
pub(crate) fn hermiticity_defect(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..=j {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > m {
                m = d;
            }
        }
    }
    m
}

/// Trace of `a^dagger b` without forming the product.
pub(crate) fn inner_trace(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc
}
