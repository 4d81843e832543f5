//! Small helpers over nalgebra for Hermitian complex matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// `‖A − Aᴴ‖_F / ‖A‖_F`, zero for the zero matrix.
pub fn hermitian_error(m: &CMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}

/// `(A + Aᴴ) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`; eigenvalues are real.
pub fn hermitian_eigen(m: &CMatrix) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    SymmetricEigen::new(hermitian_part(m))
}

/// Smallest and largest eigenvalue of the Hermitian part of `m`.
pub fn eigen_range(m: &CMatrix) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let eig = hermitian_eigen(m);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// True when `min eig ≥ −tol · max(max eig, 0)`.
pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    let (min, max) = eigen_range(m);
    min >= -tol * max.max(0.0)
}

/// Numerical rank: eigenvalues of the Hermitian matrix strictly above
/// `tol · λ_max`.
pub fn hermitian_rank(m: &CMatrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let eig = hermitian_eigen(m);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&v| v > tol * max).count()
}

/// Real part of the trace of the leading `n × n` block.
pub fn leading_trace(m: &CMatrix, n: usize) -> f64 {
    (0..n).map(|i| m[(i, i)].re).sum()
}
