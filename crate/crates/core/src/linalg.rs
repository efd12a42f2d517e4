//! Dense complex matrix helpers shared by the oracles.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{i phi}`.
pub fn cis(phi: f64) -> C64 {
    C64::new(libm::cos(phi), libm::sin(phi))
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Kronecker product with `a` as the more significant factor.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

/// Entrywise max-norm of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Result of comparing two matrices modulo a global phase.
#[derive(Debug, Clone, Copy)]
pub struct PhaseComparison {
    /// Max-norm of `a - phase * b`.
    pub deviation: f64,
    /// Unit scalar with `a ~ phase * b`.
    pub phase: C64,
}

/// Compares `a` against `b` allowing `a = c * b` for a unit scalar `c`.
pub fn compare_up_to_phase(a: &CMat, b: &CMat) -> PhaseComparison {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let (mut best, mut idx) = (0.0, 0);
    for (k, v) in b.iter().enumerate() {
        if v.norm() > best {
            best = v.norm();
            idx = k;
        }
    }
    let phase = if best == 0.0 {
        ONE
    } else {
        let r = a.as_slice()[idx] / b.as_slice()[idx];
        if r.norm() == 0.0 {
            ONE
        } else {
            r / r.norm()
        }
    };
    let deviation = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max);
    PhaseComparison { deviation, phase }
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    max_abs_diff(a, &a.adjoint()) <= tol
}

pub fn is_unitary(a: &CMat, tol: f64) -> bool {
    let n = a.nrows();
    max_abs_diff(&(a.adjoint() * a), &identity(n)) <= tol
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let n = h.nrows();
    let mut scaled = vecs.clone();
    for (k, &lambda) in vals.iter().enumerate().take(n) {
        let z = cis(-lambda * t);
        for r in 0..n {
            scaled[(r, k)] *= z;
        }
    }
    scaled * vecs.adjoint()
}

/// Numerical rank with singular values above `tol`.
pub fn rank(a: &CMat, tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}
