//! Dense-matrix helpers backing the reference evolution and test oracles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest qubit count for which dense matrices are materialised (d = 256).
pub const DENSE_QUBIT_CAP: usize = 8;

pub type DenseMatrix = DMatrix<Complex64>;

/// `exp(−iHt)` for Hermitian `H`, via eigendecomposition.
pub fn hermitian_expm(h: &DenseMatrix, t: f64) -> DenseMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t)),
    );
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &DenseMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn hermitian_norm(m: &DenseMatrix) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.abs()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DenseMatrix) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `Re Tr(Oρ)`.
pub fn expectation_dense(o: &DenseMatrix, rho: &DenseMatrix) -> f64 {
    (o * rho).trace().re
}

/// Largest entrywise distance between two matrices.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Assemble `[[tl, tr], [bl, br]]` from four equally sized blocks.
pub fn block2x2(
    tl: &DenseMatrix,
    tr: &DenseMatrix,
    bl: &DenseMatrix,
    br: &DenseMatrix,
) -> DenseMatrix {
    let d = tl.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(tl);
    out.view_mut((0, d), (d, d)).copy_from(tr);
    out.view_mut((d, 0), (d, d)).copy_from(bl);
    out.view_mut((d, d), (d, d)).copy_from(br);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
        ]));
        let u = hermitian_expm(&h, 0.3);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-14);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, 0.6)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn norms_of_simple_matrices() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-4.0, 0.0),
            ],
        );
        assert!((operator_norm(&m) - 4.0).abs() < 1e-12);
        assert!((hermitian_norm(&m) - 4.0).abs() < 1e-12);
        assert!((min_eigenvalue(&m) + 4.0).abs() < 1e-12);
    }
}
