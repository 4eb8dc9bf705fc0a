//! Mutually unbiased bases for N = 2 and odd prime N.
//!
//! For odd prime N the family is the computational basis plus the N bases
//! `v_{a,m}[j] = ω^{a j² + m j} / √N`, `a ∈ {0..N-1}`; quadratic Gauss sums
//! make every cross overlap `1/N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Basis, PureState};

/// Largest odd prime handled by [`mub_family`].
pub const MAX_PRIME: usize = 61;

/// Bases sharing one dimension. [`mub_family`] guarantees pairwise
/// unbiasedness; [`MubFamily::from_bases`] only checks dimensions.
#[derive(Debug, Clone)]
pub struct MubFamily {
    dim: usize,
    bases: Vec<Basis>,
}

impl MubFamily {
    pub fn from_bases(bases: Vec<Basis>) -> Result<Self> {
        let dim = bases.first().map(Basis::dim).ok_or(Error::DimensionZero)?;
        if let Some(b) = bases.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: b.dim() });
        }
        Ok(Self { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, i: usize) -> &Basis {
        &self.bases[i]
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn mub_family(n: usize) -> Result<MubFamily> {
    if n == 2 {
        return qubit_family();
    }
    if n.is_multiple_of(2) || n > MAX_PRIME || !is_prime(n) {
        return Err(Error::UnsupportedDimension(n));
    }
    // powers of ω tabulated once; exponents are reduced mod n before lookup
    let scale = 1.0 / (n as f64).sqrt();
    let powers: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(scale, std::f64::consts::TAU * r as f64 / n as f64))
        .collect();
    let mut bases = vec![Basis::computational(n)?];
    for a in 0..n {
        let vectors = (0..n)
            .map(|m| {
                let coeffs: Vec<Complex64> =
                    (0..n).map(|j| powers[(a * j * j + m * j) % n]).collect();
                PureState::new(&coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        bases.push(Basis::new(vectors)?);
    }
    MubFamily::from_bases(bases)
}

fn qubit_family() -> Result<MubFamily> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let z = Basis::computational(2)?;
    let x = Basis::new(vec![
        PureState::new(&[c(r, 0.0), c(r, 0.0)])?,
        PureState::new(&[c(r, 0.0), c(-r, 0.0)])?,
    ])?;
    let y = Basis::new(vec![
        PureState::new(&[c(r, 0.0), c(0.0, r)])?,
        PureState::new(&[c(r, 0.0), c(0.0, -r)])?,
    ])?;
    MubFamily::from_bases(vec![z, x, y])
}

/// Max over pairs of distinct bases of `| |<b_i|b'_j>|² - 1/N |`.
pub fn verify_unbiased(family: &MubFamily) -> f64 {
    let target = 1.0 / family.dim() as f64;
    let mut worst: f64 = 0.0;
    for (i, b) in family.bases().iter().enumerate() {
        for b2 in &family.bases()[i + 1..] {
            let overlaps = b.matrix().adjoint() * b2.matrix();
            for s in overlaps.iter() {
                worst = worst.max((s.norm_sqr() - target).abs());
            }
        }
    }
    worst
}

/// Checks that two bases are unbiased to within `tol`.
pub fn pair_deviation(b: &Basis, b2: &Basis) -> Result<f64> {
    let family = MubFamily::from_bases(vec![b.clone(), b2.clone()])?;
    Ok(verify_unbiased(&family))
}
