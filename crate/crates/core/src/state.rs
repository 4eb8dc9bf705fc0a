//! Pure states, bases, unitaries, density operators and the
//! distinguishability kernel `K(x, y) = 1 - |<x|y>|^2`.

use nalgebra::QR;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::random::RandomSource;
use crate::{MAX_DIM, TOL_ALG};

pub(crate) fn check_dim(n: usize) -> Result<()> {
    match n {
        0 => Err(Error::DimensionZero),
        n if n > MAX_DIM => Err(Error::DimensionTooLarge(n)),
        _ => Ok(()),
    }
}

fn check_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Unit vector with its global phase fixed: the first amplitude whose
/// modulus exceeds `TOL_ALG` is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    coeffs: CVec,
}

impl PureState {
    /// Normalizes and phase-canonicalizes `coeffs`.
    pub fn new(coeffs: &[Complex64]) -> Result<Self> {
        Self::from_vector(CVec::from_column_slice(coeffs))
    }

    pub fn from_vector(v: CVec) -> Result<Self> {
        check_dim(v.len())?;
        let Some(lead) = v.iter().copied().find(|c| c.norm() > TOL_ALG) else {
            return Err(Error::ZeroVector);
        };
        let norm = linalg::norm_sqr(&v).sqrt();
        let phase = lead.conj() / lead.norm();
        let mut coeffs = v.map(|c| c * phase / norm);
        if let Some(c) = coeffs.iter_mut().find(|c| c.norm() > TOL_ALG) {
            c.im = 0.0;
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::from_vector(CVec::from_iterator(
            coeffs.len(),
            coeffs.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    /// Computational basis vector `e_k`.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        check_dim(n)?;
        if k >= n {
            return Err(Error::InvalidParameters(format!("index {k} >= dimension {n}")));
        }
        let mut v = CVec::zeros(n);
        v[k] = ONE;
        Ok(Self { coeffs: v })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_same(self.dim(), other.dim())?;
        Ok(linalg::inner(&self.coeffs, &other.coeffs))
    }

    /// Outcome weights `|c_k|^2` in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn projector(&self) -> CMat {
        linalg::projector(&self.coeffs)
    }
}

/// `K(x, y) = 1 - |<x|y>|^2`, clamped to `[0, 1]`.
pub fn kernel(x: &PureState, y: &PureState) -> Result<f64> {
    let s = x.inner(y)?;
    Ok((1.0 - s.norm_sqr()).clamp(0.0, 1.0))
}

/// Ordered set of `N` mutually perfectly distinguishable states.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<PureState>,
}

impl Basis {
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let n = vectors.first().map(PureState::dim).ok_or(Error::DimensionZero)?;
        if vectors.len() != n {
            return Err(Error::NotBasis(format!("{} vectors in dimension {n}", vectors.len())));
        }
        for v in &vectors {
            check_same(n, v.dim())?;
        }
        for i in 0..n {
            for j in i + 1..n {
                let k = kernel(&vectors[i], &vectors[j])?;
                if (1.0 - k).abs() > TOL_ALG {
                    return Err(Error::NotBasis(format!("K(b{i}, b{j}) = {k}")));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// Builds a basis from the columns of a unitary matrix.
    pub fn from_columns(m: &CMat) -> Result<Self> {
        let vectors = (0..m.ncols())
            .map(|j| PureState::from_vector(m.column(j).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }

    pub fn computational(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            vectors: (0..n).map(|k| PureState::basis_state(n, k)).collect::<Result<_>>()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &PureState {
        &self.vectors[k]
    }

    /// Matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |i, j| self.vectors[j].amplitude(i))
    }

    /// Image of every vector under `u`.
    pub fn transformed(&self, u: &Unitary) -> Result<Basis> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| u.apply(v))
            .collect::<Result<Vec<_>>>()?;
        Basis::new(vectors)
    }
}

/// Affinities `p_k = 1 - K(psi, b_k)`.
pub fn affinities(psi: &PureState, basis: &Basis) -> Result<Vec<f64>> {
    check_same(psi.dim(), basis.dim())?;
    basis
        .vectors()
        .iter()
        .map(|b| kernel(psi, b).map(|k| 1.0 - k))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    m: CMat,
}

impl Unitary {
    pub fn new(m: CMat) -> Result<Self> {
        check_dim(m.nrows())?;
        check_same(m.nrows(), m.ncols())?;
        let dev = linalg::deviation_from_identity(&(m.adjoint() * &m));
        if dev > TOL_ALG * m.nrows() as f64 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    /// Skips the unitarity check; callers guarantee the invariant by construction.
    pub(crate) fn from_matrix_unchecked(m: CMat) -> Self {
        Self { m }
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { m: CMat::identity(n, n) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn adjoint(&self) -> Unitary {
        Self { m: self.m.adjoint() }
    }

    pub fn compose(&self, other: &Unitary) -> Result<Unitary> {
        check_same(self.dim(), other.dim())?;
        Ok(Self { m: &self.m * &other.m })
    }

    pub fn pow(&self, k: u32) -> Unitary {
        let mut acc = CMat::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.m;
        }
        Self { m: acc }
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        check_same(self.dim(), psi.dim())?;
        PureState::from_vector(&self.m * psi.coeffs())
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::deviation_from_identity(&(self.m.adjoint() * &self.m))
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    m: CMat,
}

impl DensityOperator {
    pub fn new(m: CMat) -> Result<Self> {
        check_dim(m.nrows())?;
        check_same(m.nrows(), m.ncols())?;
        let herm = linalg::hermiticity_defect(&m);
        if herm > TOL_ALG {
            return Err(Error::NotDensityOperator(format!("hermiticity defect {herm:e}")));
        }
        let trace = m.trace();
        if (trace - ONE).norm() > TOL_ALG {
            return Err(Error::NotDensityOperator(format!("trace {trace}")));
        }
        let (vals, _) = linalg::hermitian_eigen(&m);
        if let Some(&min) = vals.iter().find(|&&e| e < -TOL_ALG) {
            return Err(Error::NotDensityOperator(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { m })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { m: psi.projector() }
    }

    /// `I / N`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            m: CMat::identity(n, n).scale(1.0 / n as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }
}

/// `K(rho, z) = 1 - <z|rho|z>`.
pub fn mixed_kernel(rho: &DensityOperator, z: &PureState) -> Result<f64> {
    check_same(rho.dim(), z.dim())?;
    let v = z.coeffs();
    let expectation = linalg::inner(v, &(rho.matrix() * v));
    Ok((1.0 - expectation.re).clamp(0.0, 1.0))
}

/// Unitarily invariant random state: a normalized complex Gaussian vector.
pub fn haar_random_state(n: usize, rng: &mut RandomSource) -> Result<PureState> {
    check_dim(n)?;
    if n == 1 {
        return PureState::new(&[ONE]);
    }
    let v = CVec::from_fn(n, |_, _| rng.complex_normal());
    PureState::from_vector(v)
}

/// Haar unitary from the QR factorization of a complex Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_random_unitary(n: usize, rng: &mut RandomSource) -> Result<Unitary> {
    check_dim(n)?;
    let g = CMat::from_fn(n, n, |_, _| rng.complex_normal());
    let qr = QR::new(g);
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(Unitary { m: q })
}

/// Embeds `v` (with zeros appended) into dimension `n`.
pub fn embed(v: &[Complex64], n: usize) -> Result<PureState> {
    if v.len() > n {
        return Err(Error::DimensionMismatch { left: v.len(), right: n });
    }
    let mut c = vec![ZERO; n];
    c[..v.len()].copy_from_slice(v);
    PureState::new(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_state_examples() {
        let s = PureState::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.coeffs().as_slice(), &[ONE, ZERO, ZERO]);

        assert_eq!(PureState::from_real(&[0.0, 0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(PureState::new(&[]), Err(Error::DimensionZero));

        let s = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        for a in s.coeffs().iter() {
            assert!((a - c(r, 0.0)).norm() < 1e-15);
        }
        assert!((linalg::norm_sqr(s.coeffs()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_phase_makes_equal_rays_equal() {
        let a = PureState::new(&[c(0.0, 0.0), c(0.0, 2.0), c(1.0, 1.0)]).unwrap();
        let b = PureState::new(&[c(0.0, 0.0), c(-3.0, 0.0), c(-1.5, 1.5)]).unwrap();
        assert_eq!(a.amplitude(1).im, 0.0);
        assert!(a.amplitude(1).re > 0.0);
        for k in 0..3 {
            assert!((a.amplitude(k) - b.amplitude(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn kernel_examples() {
        let e0 = PureState::basis_state(3, 0).unwrap();
        let e1 = PureState::basis_state(3, 1).unwrap();
        assert_eq!(kernel(&e0, &e1).unwrap(), 1.0);
        assert_eq!(kernel(&e0, &e0).unwrap(), 0.0);
        let psi = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert!((kernel(&psi, &e0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let e2d = PureState::basis_state(2, 0).unwrap();
        assert_eq!(
            kernel(&e0, &e2d),
            Err(Error::DimensionMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn mixed_kernel_examples() {
        let e0 = PureState::basis_state(3, 0).unwrap();
        let rho = DensityOperator::from_pure(&e0);
        assert!(mixed_kernel(&rho, &e0).unwrap().abs() < 1e-15);

        let mut rng = RandomSource::new(1);
        let mm = DensityOperator::maximally_mixed(4).unwrap();
        for _ in 0..10 {
            let z = haar_random_state(4, &mut rng).unwrap();
            assert!((mixed_kernel(&mm, &z).unwrap() - 0.75).abs() < 1e-12);
        }

        for _ in 0..100 {
            let psi = haar_random_state(3, &mut rng).unwrap();
            let z = haar_random_state(3, &mut rng).unwrap();
            let rho = DensityOperator::new(psi.projector()).unwrap();
            let d = mixed_kernel(&rho, &z).unwrap() - kernel(&psi, &z).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn density_operator_rejects_invalid() {
        let mut m = CMat::identity(2, 2);
        assert!(matches!(DensityOperator::new(m.clone()), Err(Error::NotDensityOperator(_))));
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(DensityOperator::new(m.clone()), Err(Error::NotDensityOperator(_))));
        let mut n = CMat::identity(2, 2).scale(0.5);
        n[(0, 1)] = c(0.0, 0.1);
        assert!(matches!(DensityOperator::new(n), Err(Error::NotDensityOperator(_))));
    }

    #[test]
    fn affinities_examples() {
        let basis = Basis::computational(3).unwrap();
        for j in 0..3 {
            let p = affinities(basis.vector(j), &basis).unwrap();
            for (k, pk) in p.iter().enumerate() {
                assert_eq!(*pk, if j == k { 1.0 } else { 0.0 });
            }
        }
        let psi = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        for pk in affinities(&psi, &basis).unwrap() {
            assert!((pk - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_rejects_non_orthogonal() {
        let a = PureState::from_real(&[1.0, 0.0]).unwrap();
        let b = PureState::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(Basis::new(vec![a.clone(), b]), Err(Error::NotBasis(_))));
        assert!(matches!(Basis::new(vec![a]), Err(Error::NotBasis(_))));
    }

    #[test]
    fn haar_state_reproducible_and_trivial_dim() {
        let a = haar_random_state(3, &mut RandomSource::new(42)).unwrap();
        let b = haar_random_state(3, &mut RandomSource::new(42)).unwrap();
        assert_eq!(a, b);
        let one = haar_random_state(1, &mut RandomSource::new(9)).unwrap();
        assert_eq!(one.coeffs().as_slice(), &[ONE]);
        assert_eq!(haar_random_state(0, &mut RandomSource::new(0)), Err(Error::DimensionZero));
    }

    #[test]
    fn haar_state_first_moment() {
        let mut rng = RandomSource::new(5);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| haar_random_state(2, &mut rng).unwrap().probabilities()[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn haar_unitary_properties() {
        let mut rng = RandomSource::new(11);
        for n in [1, 2, 3, 5, 8] {
            let u = haar_random_unitary(n, &mut rng).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
        }
        let a = haar_random_unitary(4, &mut RandomSource::new(3)).unwrap();
        let b = haar_random_unitary(4, &mut RandomSource::new(3)).unwrap();
        for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|_| haar_random_unitary(2, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = CMat::identity(2, 2).scale(2.0);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary(_))));
    }
}
