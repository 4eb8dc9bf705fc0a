//! Small dense complex linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `<x|y>`, conjugate-linear in the first slot.
pub fn inner(x: &CVec, y: &CVec) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &CVec) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn deviation_from_identity(a: &CMat) -> f64 {
    max_abs_diff(a, &CMat::identity(a.nrows(), a.ncols()))
}

/// `|v><v|`.
pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn hermiticity_defect(h: &CMat) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

/// Eigen-decomposition of a Hermitian matrix: real eigenvalues and the
/// unitary whose columns are the eigenvectors.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    // symmetrize to keep the solver on the Hermitian path
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(-i H t)` for Hermitian `H`, computed spectrally.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    spectral_unitary(&vecs, &vals.iter().map(|e| -e * t).collect::<Vec<_>>())
}

/// `Σ_k exp(i θ_k) |v_k><v_k|` from the columns of `vecs`.
pub fn spectral_unitary(vecs: &CMat, phases: &[f64]) -> CMat {
    let n = vecs.nrows();
    let diag = CVec::from_iterator(n, phases.iter().map(|&p| Complex64::from_polar(1.0, p)));
    vecs * CMat::from_diagonal(&diag) * vecs.adjoint()
}

/// Number of singular values above `threshold`.
pub fn numerical_rank(m: &DMatrix<f64>, threshold: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// Shannon entropy in bits; zero-probability terms contribute nothing.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}
