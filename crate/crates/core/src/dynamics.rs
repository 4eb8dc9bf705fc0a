//! Cyclic dynamics: the order-N shift, its Fourier eigenbasis, band-limited
//! interpolation to a one-parameter unitary group, the generator `H`, the
//! real-field obstruction at N = 2 and discrete loop holonomy.
//!
//! Units: `ħ = 1`. The evolution is `U(t) = Σ_k exp(2πi k t / T) |f_k><f_k|`
//! with `P f_k = ω^k f_k`, so `U(nT/N) = P^n` and `U(T) = I`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::state::{self, Basis, PureState, Unitary};
use crate::random::RandomSource;
use crate::TOL_ALG;

/// `ω^r = exp(2πi r / n)`, reducing `r` modulo `n` first.
pub(crate) fn root_of_unity(r: i64, n: usize) -> Complex64 {
    let n_i = n as i64;
    Complex64::from_polar(1.0, TAU * (r.rem_euclid(n_i)) as f64 / n as f64)
}

/// The cyclic shift `P e_k = e_{k+1 mod N}`.
#[derive(Debug, Clone)]
pub struct CyclicGenerator {
    unitary: Unitary,
}

pub fn cyclic_generator(n: usize) -> Result<CyclicGenerator> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    state::check_dim(n)?;
    let m = CMat::from_fn(n, n, |j, k| if j == (k + 1) % n { ONE } else { ZERO });
    Ok(CyclicGenerator {
        unitary: Unitary::new(m)?,
    })
}

impl CyclicGenerator {
    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    /// Max entrywise deviation of `P^k` from `I`.
    pub fn power_deviation(&self, k: u32) -> f64 {
        linalg::deviation_from_identity(self.unitary.pow(k).matrix())
    }

    /// Eigenvalues sorted by argument in `[0, 2π)`. `P` is normal, so the
    /// Hermitian matrix `Re P + c Im P` (generic `c`) shares its eigenvectors;
    /// each eigenvalue is read off as `v† P v`. A general real Schur solve
    /// stalls on even-order cyclic shifts.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let p = self.unitary.matrix();
        let half = Complex64::new(0.5, 0.0);
        let re_part = (p + p.adjoint()) * half;
        let im_part = (p - p.adjoint()) * Complex64::new(0.0, -0.5);
        let mixed = re_part + im_part * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (_, vecs) = linalg::hermitian_eigen(&mixed);
        let mut vals: Vec<Complex64> = vecs
            .column_iter()
            .map(|v| {
                let v = v.into_owned();
                linalg::inner(&v, &(p * &v))
            })
            .collect();
        vals.sort_by(|a, b| arg_0_2pi(*a).total_cmp(&arg_0_2pi(*b)));
        vals
    }

    /// Largest distance from a computed eigenvalue to the nearest N-th root of unity,
    /// together with whether every root is matched by some eigenvalue.
    pub fn roots_of_unity_defect(&self) -> f64 {
        let n = self.dim();
        let vals = self.eigenvalues();
        let roots: Vec<Complex64> = (0..n as i64).map(|k| root_of_unity(k, n)).collect();
        let to_roots = vals
            .iter()
            .map(|v| roots.iter().map(|r| (v - r).norm()).fold(f64::MAX, f64::min))
            .fold(0.0, f64::max);
        let to_vals = roots
            .iter()
            .map(|r| vals.iter().map(|v| (v - r).norm()).fold(f64::MAX, f64::min))
            .fold(0.0, f64::max);
        to_roots.max(to_vals)
    }
}

fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    // snap -0 and tiny negatives onto 0 so that 1 sorts first
    if a < -1e-9 {
        a + TAU
    } else {
        a.max(0.0)
    }
}

/// `f_k = N^{-1/2} Σ_j ω^{-jk} e_j`, satisfying `P f_k = ω^k f_k`.
pub fn fourier_eigenbasis(n: usize) -> Result<Basis> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    state::check_dim(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let vectors = (0..n)
        .map(|k| {
            let coeffs: Vec<Complex64> = (0..n)
                .map(|j| root_of_unity(-((j * k) as i64), n) * scale)
                .collect();
            PureState::new(&coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    Basis::new(vectors)
}

/// One eigenvector of a permutation matrix and its kernel profile against the
/// computational basis.
#[derive(Debug, Clone, Serialize)]
pub struct EigenProfile {
    pub orbit: Vec<usize>,
    pub frequency: usize,
    /// `K(e_i, f)` for every `i`.
    pub kernels: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PermutationProfile {
    pub cycle_type: Vec<usize>,
    pub eigenvectors: Vec<EigenProfile>,
    /// Max `‖P f − λ f‖` over the constructed eigenvectors.
    pub eigen_defect: f64,
    /// All `K(e_i, f)` equal.
    pub uniform: bool,
}

/// Orbits of `sigma` (each starting at its smallest element) in order of first element.
pub fn cycles(sigma: &[usize]) -> Result<Vec<Vec<usize>>> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidPermutation(format!("{sigma:?}")));
        }
    }
    let mut visited = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut orbit = vec![start];
        visited[start] = true;
        let mut i = sigma[start];
        while i != start {
            visited[i] = true;
            orbit.push(i);
            i = sigma[i];
        }
        out.push(orbit);
    }
    Ok(out)
}

/// Eigenvectors of the permutation matrix `P e_i = e_{σ(i)}`, built orbit by
/// orbit, and their kernel profiles against the computational basis.
pub fn permutation_eigen_analysis(sigma: &[usize]) -> Result<PermutationProfile> {
    let n = sigma.len();
    state::check_dim(n)?;
    let orbits = cycles(sigma)?;
    let p = CMat::from_fn(n, n, |i, j| if sigma[j] == i { ONE } else { ZERO });
    let computational = Basis::computational(n)?;

    let mut eigenvectors = Vec::with_capacity(n);
    let mut eigen_defect: f64 = 0.0;
    for orbit in &orbits {
        let len = orbit.len();
        let scale = 1.0 / (len as f64).sqrt();
        for k in 0..len {
            let mut c = vec![ZERO; n];
            for (j, &idx) in orbit.iter().enumerate() {
                c[idx] = root_of_unity(-((j * k) as i64), len) * scale;
            }
            let f = PureState::new(&c)?;
            let lambda = root_of_unity(k as i64, len);
            let residual = &p * f.coeffs() - f.coeffs() * lambda;
            eigen_defect = eigen_defect.max(linalg::norm_sqr(&residual).sqrt());
            let kernels = computational
                .vectors()
                .iter()
                .map(|e| state::kernel(e, &f))
                .collect::<Result<Vec<_>>>()?;
            eigenvectors.push(EigenProfile {
                orbit: orbit.clone(),
                frequency: k,
                kernels,
            });
        }
    }
    let first = eigenvectors[0].kernels[0];
    let uniform = eigenvectors
        .iter()
        .flat_map(|e| e.kernels.iter())
        .all(|&k| (k - first).abs() <= TOL_ALG);
    Ok(PermutationProfile {
        cycle_type: orbits.iter().map(Vec::len).collect(),
        eigenvectors,
        eigen_defect,
        uniform,
    })
}

/// Band-limited interpolation of the discrete powers of `P`.
#[derive(Debug, Clone)]
pub struct EvolutionFamily {
    eigenvectors: Basis,
    /// Per-step eigenphases `θ_k = 2πk/N`.
    eigenphases: Vec<f64>,
    period: f64,
}

pub fn interpolate_evolution(generator: &CyclicGenerator, period: f64) -> Result<EvolutionFamily> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameters(format!("period must be positive, got {period}")));
    }
    let n = generator.dim();
    Ok(EvolutionFamily {
        eigenvectors: fourier_eigenbasis(n)?,
        eigenphases: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
        period,
    })
}

impl EvolutionFamily {
    pub fn dim(&self) -> usize {
        self.eigenvectors.dim()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eigenvectors(&self) -> &Basis {
        &self.eigenvectors
    }

    pub fn eigenphases(&self) -> &[f64] {
        &self.eigenphases
    }

    /// Angular frequency of each eigencomponent: `θ_k · N / T = 2πk / T`.
    pub fn frequencies(&self) -> Vec<f64> {
        let steps_per_time = self.dim() as f64 / self.period;
        self.eigenphases.iter().map(|th| th * steps_per_time).collect()
    }

    pub fn evaluate(&self, t: f64) -> Unitary {
        let phases: Vec<f64> = self.frequencies().iter().map(|w| w * t).collect();
        Unitary::from_matrix_unchecked(linalg::spectral_unitary(
            &self.eigenvectors.matrix(),
            &phases,
        ))
    }
}

/// Self-adjoint generator with `exp(-iHt) = U(t)`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    h: CMat,
}

impl Hamiltonian {
    pub fn new(h: CMat) -> Result<Self> {
        state::check_dim(h.nrows())?;
        let defect = linalg::hermiticity_defect(&h);
        if defect > TOL_ALG {
            return Err(Error::InvalidParameters(format!("not Hermitian (defect {defect:e})")));
        }
        Ok(Self { h })
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    /// Ascending eigenvalues.
    pub fn energies(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.h).0
    }

    /// `exp(-iHt)`.
    pub fn evolve(&self, t: f64) -> Unitary {
        Unitary::from_matrix_unchecked(linalg::expm_hermitian(&self.h, t))
    }
}

/// `H = -Σ_k (2πk/T) |f_k><f_k|`. The sign makes `exp(-iHt)` reproduce the
/// family's positive eigenphases; energy magnitudes are `2πk/T`.
pub fn hamiltonian_from_cycle(family: &EvolutionFamily) -> Hamiltonian {
    let m = family.eigenvectors.matrix();
    let diag = nalgebra::DVector::from_iterator(
        family.dim(),
        family.frequencies().into_iter().map(|w| Complex64::new(-w, 0.0)),
    );
    let h = &m * CMat::from_diagonal(&diag) * m.adjoint();
    // exact Hermitian symmetrization; construction is Hermitian up to rounding
    Hamiltonian {
        h: (&h + h.adjoint()).scale(0.5),
    }
}

/// Result of scanning real matrices `((a, b), (b, a))` for orthogonality.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionScan {
    pub resolution: usize,
    pub grid_points: usize,
    /// Cluster centroids `(a, b)`.
    pub solutions: Vec<(f64, f64)>,
    /// Largest distance from a cluster member to its centroid.
    pub max_cluster_radius: f64,
}

fn orthogonality_residual(a: f64, b: f64) -> f64 {
    (a * a + b * b - 1.0).abs() + (a * b).abs()
}

/// Grid scan over `a, b ∈ [-1, 1]` for `a² + b² = 1, ab = 0`. Grid-local
/// minima of the residual below one grid step are kept and merged within
/// `2 / resolution`.
pub fn n2_obstruction_scan(resolution: usize) -> Result<ObstructionScan> {
    if resolution < 100 {
        return Err(Error::InvalidParameters(format!("resolution {resolution} < 100")));
    }
    let m = resolution + 1;
    let step = 2.0 / resolution as f64;
    let coord = |i: usize| -1.0 + step * i as f64;
    let r = |i: usize, j: usize| orthogonality_residual(coord(i), coord(j));

    let mut candidates = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let v = r(i, j);
            if v > step {
                continue;
            }
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 || ni >= m as i64 || nj >= m as i64 {
                        continue;
                    }
                    if r(ni as usize, nj as usize) < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                candidates.push((coord(i), coord(j)));
            }
        }
    }

    let merge = 2.0 / resolution as f64 + 1e-12;
    let mut clusters: Vec<Vec<(f64, f64)>> = Vec::new();
    for p in candidates {
        let hit = clusters.iter_mut().find(|c| {
            c.iter()
                .any(|q| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() <= merge)
        });
        match hit {
            Some(c) => c.push(p),
            None => clusters.push(vec![p]),
        }
    }
    let mut solutions = Vec::new();
    let mut max_cluster_radius: f64 = 0.0;
    for c in &clusters {
        let k = c.len() as f64;
        let centroid = (
            c.iter().map(|p| p.0).sum::<f64>() / k,
            c.iter().map(|p| p.1).sum::<f64>() / k,
        );
        for p in c {
            max_cluster_radius = max_cluster_radius
                .max(((p.0 - centroid.0).powi(2) + (p.1 - centroid.1).powi(2)).sqrt());
        }
        solutions.push(centroid);
    }
    solutions.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(ObstructionScan {
        resolution,
        grid_points: m * m,
        solutions,
        max_cluster_radius,
    })
}

/// Checks on the complex family `U(θ) = exp(iθS)`, `S` the 2×2 swap.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexFamilyCheck {
    pub samples: usize,
    pub max_unitarity_defect: f64,
    /// Max entry of `[U(θ), S]`.
    pub max_commutator: f64,
    /// Max `|K(Ux, Uy) - K(x, y)|` over random pairs.
    pub max_kernel_change: f64,
    /// Max `‖U(θ+h) − U(θ)‖_max / h`.
    pub lipschitz_estimate: f64,
    /// Min over interior θ of the distance from `U(θ)` to `{I, -I}`.
    pub min_distance_from_trivial: f64,
    /// Max imaginary entry magnitude; non-zero means the family leaves the reals.
    pub max_imaginary_part: f64,
}

pub fn swap_matrix() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

/// `exp(iθS) = cos θ I + i sin θ S`.
pub fn swap_family(theta: f64) -> CMat {
    let s = swap_matrix();
    CMat::identity(2, 2) * Complex64::new(theta.cos(), 0.0) + s * Complex64::new(0.0, theta.sin())
}

/// Samples `θ = π j / samples` for interior `j`, with random state pairs for
/// the kernel check.
pub fn complex_family_check(samples: usize, rng: &mut RandomSource) -> Result<ComplexFamilyCheck> {
    if samples < 4 {
        return Err(Error::InvalidParameters(format!("samples {samples} < 4")));
    }
    let s = swap_matrix();
    let h = 1e-6;
    let mut out = ComplexFamilyCheck {
        samples,
        max_unitarity_defect: 0.0,
        max_commutator: 0.0,
        max_kernel_change: 0.0,
        lipschitz_estimate: 0.0,
        min_distance_from_trivial: f64::MAX,
        max_imaginary_part: 0.0,
    };
    let identity = CMat::identity(2, 2);
    for j in 1..samples {
        let theta = PI * j as f64 / samples as f64;
        let u = swap_family(theta);
        out.max_unitarity_defect = out
            .max_unitarity_defect
            .max(linalg::deviation_from_identity(&(u.adjoint() * &u)));
        out.max_commutator = out
            .max_commutator
            .max(linalg::max_abs_diff(&(&u * &s), &(&s * &u)));
        out.lipschitz_estimate = out
            .lipschitz_estimate
            .max(linalg::max_abs_diff(&swap_family(theta + h), &u) / h);
        let trivial = linalg::max_abs_diff(&u, &identity).min(linalg::max_abs_diff(&u, &(-&identity)));
        out.min_distance_from_trivial = out.min_distance_from_trivial.min(trivial);
        out.max_imaginary_part = out
            .max_imaginary_part
            .max(u.iter().map(|z| z.im.abs()).fold(0.0, f64::max));

        let unitary = Unitary::new(u)?;
        let x = state::haar_random_state(2, rng)?;
        let y = state::haar_random_state(2, rng)?;
        let before = state::kernel(&x, &y)?;
        let after = state::kernel(&unitary.apply(&x)?, &unitary.apply(&y)?)?;
        out.max_kernel_change = out.max_kernel_change.max((after - before).abs());
    }
    Ok(out)
}

/// Bargmann (Pancharatnam) phase `arg Π <ψ_i|ψ_{i+1}>` of a closed loop.
pub fn bargmann_holonomy(path: &[PureState]) -> Result<f64> {
    let vectors: Vec<CVec> = path.iter().map(|p| p.coeffs().clone()).collect();
    bargmann_phase(&vectors)
}

/// Same as [`bargmann_holonomy`] on raw unit vectors with arbitrary phases.
pub fn bargmann_phase(path: &[CVec]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameters("loop needs at least two states".into()));
    }
    let first = &path[0];
    let last = &path[path.len() - 1];
    if first.len() != last.len() {
        return Err(Error::DimensionMismatch { left: first.len(), right: last.len() });
    }
    if 1.0 - linalg::inner(first, last).norm_sqr() > TOL_ALG {
        return Err(Error::OpenLoop);
    }
    let mut product = ONE;
    for (i, pair) in path.windows(2).enumerate() {
        if pair[0].len() != pair[1].len() {
            return Err(Error::DimensionMismatch { left: pair[0].len(), right: pair[1].len() });
        }
        let s = linalg::inner(&pair[0], &pair[1]);
        if s.norm() <= TOL_ALG {
            return Err(Error::OrthogonalLink { index: i, next: i + 1 });
        }
        product *= s;
    }
    let phase = product.arg();
    Ok(if phase <= -PI { PI } else { phase })
}
