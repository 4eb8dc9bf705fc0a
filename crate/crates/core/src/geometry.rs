//! Fubini-Study and Fisher-Rao metrics and the checks that single out the
//! probability assignment `p_k = |c_k|^2` (Born exponent `α = 2`).
//!
//! Radial directions change the weights `x_k = |c_k|^2` with phases held
//! fixed. On them `g_FS = Σ dx_k² / (4 x_k)`, and for `p_k = f(x_k)` the
//! Fisher-Rao metric is `Σ f'(x_k)² dx_k² / f(x_k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CVec};
use crate::random::RandomSource;
use crate::state::{self, PureState};
use crate::TOL_ALG;

/// States with any weight below this are resampled.
pub const INTERIOR_FLOOR: f64 = 1e-4;

/// Tangent vector at `base`, with the component along `base` whose real part
/// is non-zero removed so that `Re<ψ|dψ> = 0`.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: PureState,
    components: CVec,
}

impl TangentVector {
    pub fn new(base: PureState, components: CVec) -> Result<Self> {
        if base.dim() != components.len() {
            return Err(Error::DimensionMismatch { left: base.dim(), right: components.len() });
        }
        let along = linalg::inner(base.coeffs(), &components).re;
        let components = components - base.coeffs() * num_complex::Complex64::new(along, 0.0);
        Ok(Self { base, components })
    }

    pub fn base(&self) -> &PureState {
        &self.base
    }

    pub fn components(&self) -> &CVec {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.components).sqrt()
    }

    /// Same direction with unit Euclidean norm (zero stays zero).
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let components = if n > 0.0 {
            self.components.unscale(n)
        } else {
            self.components.clone()
        };
        Self { base: self.base.clone(), components }
    }

    /// Carries base and direction by the same unitary.
    pub fn transported(&self, u: &state::Unitary) -> Result<Self> {
        if u.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch { left: u.dim(), right: self.base.dim() });
        }
        let raw_base = u.matrix() * self.base.coeffs();
        let base = PureState::from_vector(raw_base.clone())?;
        // canonicalization rephases the base; apply the same phase to the direction
        let phase = linalg::inner(&raw_base, base.coeffs());
        let components = (u.matrix() * &self.components) * phase;
        Self::new(base, components)
    }
}

/// `g_FS(dψ) = <dψ|dψ> - |<ψ|dψ>|²`.
pub fn fs_metric(v: &TangentVector) -> f64 {
    let overlap = linalg::inner(v.base.coeffs(), &v.components);
    (linalg::norm_sqr(&v.components) - overlap.norm_sqr()).max(0.0)
}

/// Change of the weights `x_k = |c_k|²` along a direction with `Σ dx_k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDirection {
    x: Vec<f64>,
    dx: Vec<f64>,
}

impl RadialDirection {
    pub fn new(x: Vec<f64>, dx: Vec<f64>) -> Result<Self> {
        if x.len() != dx.len() {
            return Err(Error::DimensionMismatch { left: x.len(), right: dx.len() });
        }
        let total: f64 = dx.iter().sum();
        if total.abs() > TOL_ALG {
            return Err(Error::InvalidParameters(format!("Σ dx = {total:e} ≠ 0")));
        }
        for (index, (&p, &d)) in x.iter().zip(dx.iter()).enumerate() {
            if d != 0.0 && p <= 0.0 {
                return Err(Error::BoundarySingularity { index, p, dp: d });
            }
        }
        Ok(Self { x, dx })
    }

    /// `dx_k = 2 Re(conj(c_k) dψ_k)`; the phase part of `dψ` is discarded.
    pub fn from_tangent(v: &TangentVector) -> Result<Self> {
        let c = v.base.coeffs();
        let x = c.iter().map(|a| a.norm_sqr()).collect();
        let dx = c
            .iter()
            .zip(v.components.iter())
            .map(|(a, d)| 2.0 * (a.conj() * d).re)
            .collect();
        Self::new(x, dx)
    }

    /// Phase-preserving tangent `dψ_k = c_k dx_k / (2 x_k)` at `base`.
    pub fn to_tangent(&self, base: &PureState) -> Result<TangentVector> {
        if base.dim() != self.x.len() {
            return Err(Error::DimensionMismatch { left: base.dim(), right: self.x.len() });
        }
        let comps = CVec::from_iterator(
            self.x.len(),
            (0..self.x.len()).map(|k| {
                if self.dx[k] == 0.0 {
                    linalg::ZERO
                } else {
                    base.amplitude(k) * (self.dx[k] / (2.0 * self.x[k]))
                }
            }),
        );
        TangentVector::new(base.clone(), comps)
    }

    pub fn weights(&self) -> &[f64] {
        &self.x
    }

    pub fn components(&self) -> &[f64] {
        &self.dx
    }
}

/// Closed form of `g_FS` on a radial direction: `Σ dx_k² / (4 x_k)`.
pub fn fs_radial(r: &RadialDirection) -> f64 {
    r.x.iter()
        .zip(r.dx.iter())
        .filter(|(_, &d)| d != 0.0)
        .map(|(&x, &d)| d * d / (4.0 * x))
        .sum()
}

/// `g_FR = Σ dp_k² / p_k`.
pub fn fr_metric(p: &[f64], dp: &[f64]) -> Result<f64> {
    if p.len() != dp.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: dp.len() });
    }
    let total: f64 = dp.iter().sum();
    if total.abs() > TOL_ALG {
        return Err(Error::InvalidParameters(format!("Σ dp = {total:e} ≠ 0")));
    }
    let mut g = 0.0;
    for (index, (&pk, &d)) in p.iter().zip(dp.iter()).enumerate() {
        if d == 0.0 {
            continue;
        }
        if pk <= TOL_ALG {
            return Err(Error::BoundarySingularity { index, p: pk, dp: d });
        }
        g += d * d / pk;
    }
    Ok(g)
}

/// `g_FR / g_FS` on a radial direction for `p_k = x_k^{α/2} / Σ_j x_j^{α/2}`.
pub fn power_law_ratio(alpha: f64, r: &RadialDirection) -> Result<f64> {
    let a = alpha / 2.0;
    let q: Vec<f64> = r.x.iter().map(|x| x.powf(a)).collect();
    let dq: Vec<f64> = r
        .x
        .iter()
        .zip(r.dx.iter())
        .map(|(&x, &d)| if d == 0.0 { 0.0 } else { a * x.powf(a - 1.0) * d })
        .collect();
    let s: f64 = q.iter().sum();
    let ds: f64 = dq.iter().sum();
    let p: Vec<f64> = q.iter().map(|v| v / s).collect();
    let mut dp: Vec<f64> = q
        .iter()
        .zip(dq.iter())
        .map(|(&v, &d)| d / s - v * ds / (s * s))
        .collect();
    // remove rounding drift so the tangency precondition holds exactly
    let drift = dp.iter().sum::<f64>() / dp.len() as f64;
    dp.iter_mut().for_each(|d| *d -= drift);
    let g_fs = fs_radial(r);
    if g_fs <= 0.0 {
        return Ok(0.0);
    }
    Ok(fr_metric(&p, &dp)? / g_fs)
}

/// Haar state whose weights all exceed [`INTERIOR_FLOOR`].
pub fn interior_state(n: usize, rng: &mut RandomSource) -> Result<PureState> {
    loop {
        let s = state::haar_random_state(n, rng)?;
        if s.probabilities().iter().all(|&x| x >= INTERIOR_FLOOR) {
            return Ok(s);
        }
    }
}

fn random_radial(x: Vec<f64>, rng: &mut RandomSource) -> Result<RadialDirection> {
    let n = x.len();
    let mut dx: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let mean = dx.iter().sum::<f64>() / n as f64;
    dx.iter_mut().for_each(|d| *d -= mean);
    let drift: f64 = dx.iter().sum();
    dx[n - 1] -= drift;
    RadialDirection::new(x, dx)
}

/// Population coefficient of variation (stddev / mean).
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if mean == 0.0 {
        return if var == 0.0 { 0.0 } else { f64::INFINITY };
    }
    var.sqrt() / mean.abs()
}

/// Coefficient of variation of `g_FR(α) / g_FS` over random interior states
/// and radial directions. Zero iff the ratio is state independent.
pub fn born_exponent_residual(
    alpha: f64,
    n: usize,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameters(format!("alpha must be positive, got {alpha}")));
    }
    if n < 3 {
        return Err(Error::DimensionTooSmall { got: n, min: 3 });
    }
    if samples < 10 {
        return Err(Error::InvalidParameters(format!("samples {samples} < 10")));
    }
    let mut ratios = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = interior_state(n, rng)?;
        let r = random_radial(psi.probabilities(), rng)?;
        ratios.push(power_law_ratio(alpha, &r)?);
    }
    Ok(coefficient_of_variation(&ratios))
}

/// Outcome of integrating `f' = √c √(f/x)` from `x = ε`.
#[derive(Debug, Clone, Serialize)]
pub struct OdeCheck {
    pub grid_points: usize,
    pub epsilon: f64,
    /// Calibrated constant.
    pub c: f64,
    pub f_at_one: f64,
    /// `max_x |f(x) − x|` over the grid.
    pub max_deviation: f64,
}

fn integrate_profile(c: f64, epsilon: f64, grid_points: usize) -> Vec<(f64, f64)> {
    let rhs = |x: f64, f: f64| c.sqrt() * (f.max(0.0) / x).sqrt();
    let h = (1.0 - epsilon) / (grid_points - 1) as f64;
    let mut out = Vec::with_capacity(grid_points);
    let mut f = c * epsilon;
    out.push((epsilon, f));
    for i in 0..grid_points - 1 {
        let x = epsilon + h * i as f64;
        let k1 = rhs(x, f);
        let k2 = rhs(x + h / 2.0, f + h / 2.0 * k1);
        let k3 = rhs(x + h / 2.0, f + h / 2.0 * k2);
        let k4 = rhs(x + h, f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let next = if i + 2 == grid_points { 1.0 } else { epsilon + h * (i + 1) as f64 };
        out.push((next, f));
    }
    out
}

/// RK4 integration of the compatibility ODE with the regularized start
/// `f(ε) = cε`, `c` calibrated by secant shooting on `f(1) = 1`.
pub fn ode_uniqueness_check(grid_points: usize, epsilon: f64) -> Result<OdeCheck> {
    if grid_points < 1000 {
        return Err(Error::InvalidParameters(format!("grid {grid_points} < 1000")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameters(format!("epsilon {epsilon} not in (0, 1)")));
    }
    let end = |c: f64| integrate_profile(c, epsilon, grid_points).last().map_or(0.0, |p| p.1);
    let (mut c0, mut c1) = (0.5, 2.0);
    let (mut g0, mut g1) = (end(c0) - 1.0, end(c1) - 1.0);
    for _ in 0..50 {
        if g1.abs() < 1e-15 || g1 == g0 {
            break;
        }
        let c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
        c0 = c1;
        g0 = g1;
        c1 = c2;
        g1 = end(c1) - 1.0;
    }
    let profile = integrate_profile(c1, epsilon, grid_points);
    let max_deviation = profile.iter().map(|(x, f)| (f - x).abs()).fold(0.0, f64::max);
    Ok(OdeCheck {
        grid_points,
        epsilon,
        c: c1,
        f_at_one: profile.last().map_or(0.0, |p| p.1),
        max_deviation,
    })
}

/// For `f(x) = x^{α/2}`, `f'²/f ∝ x^{α/2 − 2}`; matching `1/x` needs this to vanish.
pub fn power_law_exponent_mismatch(alpha: f64) -> f64 {
    (alpha / 2.0 - 2.0) - (-1.0)
}

/// `|f(1/2) + f(1/2) − 1| = |2^{1−α/2} − 1|` for `f(x) = x^{α/2}`.
pub fn n2_normalization_gap(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameters(format!("alpha must be positive, got {alpha}")));
    }
    Ok((2f64.powf(1.0 - alpha / 2.0) - 1.0).abs())
}

/// `(α/2)² Σ_k |c_k|^{α−2} |dψ_k|²` over `Σ_k |dψ_k|²` for the horizontal
/// part of `dψ`. Identically 1 at `α = 2`; `None` for a null direction.
pub fn weighted_ratio(alpha: f64, psi: &CVec, dpsi: &CVec) -> Option<f64> {
    let overlap = linalg::inner(psi, dpsi);
    let horizontal = dpsi - psi * overlap;
    let g_fs = linalg::norm_sqr(&horizontal);
    if g_fs <= TOL_ALG * TOL_ALG {
        return None;
    }
    let a = alpha / 2.0;
    let g_fr: f64 = psi
        .iter()
        .zip(horizontal.iter())
        .map(|(c, d)| c.norm_sqr().powf(a - 1.0) * d.norm_sqr())
        .sum::<f64>()
        * a
        * a;
    Some(g_fr / g_fs)
}

/// Spread (max − min) of [`weighted_ratio`] along `t ↦ exp(−iHt)(ψ, dψ)`.
pub fn orbit_distortion(
    alpha: f64,
    psi: &CVec,
    dpsi: &CVec,
    hamiltonian: &crate::dynamics::Hamiltonian,
    times: &[f64],
) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in times {
        let u = hamiltonian.evolve(t);
        let Some(r) = weighted_ratio(alpha, &(u.matrix() * psi), &(u.matrix() * dpsi)) else {
            return 0.0;
        };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Random Hamiltonian `V diag(E) V†`, `V` Haar and `E` uniform in `[−π, π]`.
pub fn random_hamiltonian(n: usize, rng: &mut RandomSource) -> Result<crate::dynamics::Hamiltonian> {
    let v = state::haar_random_unitary(n, rng)?;
    let diag = CVec::from_fn(n, |_, _| {
        num_complex::Complex64::new(rng.uniform_range(-std::f64::consts::PI, std::f64::consts::PI), 0.0)
    });
    let m = v.matrix() * linalg::CMat::from_diagonal(&diag) * v.matrix().adjoint();
    crate::dynamics::Hamiltonian::new((&m + m.adjoint()).scale(0.5))
}

/// Evolves a random state and tangent direction under a random Hamiltonian
/// for `t ∈ [0, 2π)` in `steps` increments and returns the spread of the
/// metric ratio along the orbit.
pub fn dynamics_distortion(
    alpha: f64,
    n: usize,
    steps: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameters(format!("alpha must be positive, got {alpha}")));
    }
    if n < 3 {
        return Err(Error::DimensionTooSmall { got: n, min: 3 });
    }
    if steps < 10 {
        return Err(Error::InvalidParameters(format!("steps {steps} < 10")));
    }
    let psi = interior_state(n, rng)?;
    let dpsi = CVec::from_fn(n, |_, _| rng.complex_normal());
    let h = random_hamiltonian(n, rng)?;
    let times: Vec<f64> = (0..steps)
        .map(|j| std::f64::consts::TAU * j as f64 / steps as f64)
        .collect();
    Ok(orbit_distortion(alpha, psi.coeffs(), &dpsi, &h, &times))
}

/// Second-order remainder of `K(ψ, normalize(ψ + h dψ)) ≈ h² g_FS`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionPoint {
    pub h: f64,
    pub kernel: f64,
    pub quadratic: f64,
    /// `|K − h² g_FS| / h³`.
    pub cubic_coefficient: f64,
}

pub fn expansion_point(v: &TangentVector, h: f64) -> Result<ExpansionPoint> {
    let moved = PureState::from_vector(v.base.coeffs() + v.components.scale(h))?;
    let kernel = state::kernel(&v.base, &moved)?;
    let quadratic = h * h * fs_metric(v);
    Ok(ExpansionPoint {
        h,
        kernel,
        quadratic,
        cubic_coefficient: (kernel - quadratic).abs() / (h * h * h),
    })
}

/// Random unit tangent vector at a Haar-random base.
pub fn random_unit_tangent(n: usize, rng: &mut RandomSource) -> Result<TangentVector> {
    let base = state::haar_random_state(n, rng)?;
    let comps = CVec::from_fn(n, |_, _| rng.complex_normal());
    Ok(TangentVector::new(base, comps)?.normalized())
}

/// Exponents scanned when locating the residual minimum.
pub const ALPHA_GRID: [f64; 8] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];

/// [`born_exponent_residual`] for each `alpha` on the same sample stream.
pub fn alpha_scan(alphas: &[f64], n: usize, samples: usize, rng: &RandomSource) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, born_exponent_residual(a, n, samples, &mut rng.split(0))?)))
        .collect()
}

/// Bound on `|K − h² g_FS| / h³` for unit tangents.
pub const CUBIC_BOUND: f64 = 1.0;
pub const EXPANSION_STEPS: [f64; 2] = [1e-3, 1e-4];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCheck {
    pub pairs: usize,
    /// Max cubic coefficient at each step in `EXPANSION_STEPS`.
    pub max_coefficient: [f64; 2],
    /// Max of `C(h_fine) − C(h_coarse)` over pairs.
    pub max_growth: f64,
}

/// The remainder of the quadratic expansion stays cubic: its coefficient is
/// bounded and does not grow as `h` shrinks.
pub fn fs_expansion_check(n: usize, pairs: usize, rng: &mut RandomSource) -> Result<ExpansionCheck> {
    let mut out = ExpansionCheck { pairs, max_coefficient: [0.0; 2], max_growth: f64::NEG_INFINITY };
    for _ in 0..pairs {
        let v = random_unit_tangent(n, rng)?;
        let coarse = expansion_point(&v, EXPANSION_STEPS[0])?.cubic_coefficient;
        let fine = expansion_point(&v, EXPANSION_STEPS[1])?.cubic_coefficient;
        out.max_coefficient[0] = out.max_coefficient[0].max(coarse);
        out.max_coefficient[1] = out.max_coefficient[1].max(fine);
        out.max_growth = out.max_growth.max(fine - coarse);
    }
    Ok(out)
}
