//! Tensor composition and the consequences checked on composite systems:
//! the kernel composition law, local tomography over ℝ vs ℂ, CHSH, the
//! measurement interaction, the no-cloning overlap gap, entropic uncertainty
//! and capacity dilution.
//!
//! Joint index convention: `k = a · N_B + b`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE};
use crate::mub;
use crate::random::RandomSource;
use crate::report::CheckReport;
use crate::state::{self, Basis, PureState, Unitary};
use crate::{params, TOL_ALG};

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    dims: (usize, usize),
    joint: PureState,
}

impl CompositeState {
    pub fn new(dims: (usize, usize), joint: PureState) -> Result<Self> {
        if dims.0 * dims.1 != joint.dim() {
            return Err(Error::DimensionMismatch { left: dims.0 * dims.1, right: joint.dim() });
        }
        Ok(Self { dims, joint })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn joint(&self) -> &PureState {
        &self.joint
    }

    /// Singular values of the `N_A × N_B` coefficient matrix, descending.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let (na, nb) = self.dims;
        let m = CMat::from_fn(na, nb, |a, b| self.joint.amplitude(a * nb + b));
        let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    }

    pub fn schmidt_rank(&self) -> usize {
        self.schmidt_coefficients().iter().filter(|&&s| s > 1e-9).count()
    }
}

/// `c_{ab} = x_a y_b`.
pub fn tensor_state(x: &PureState, y: &PureState) -> Result<CompositeState> {
    let joint = PureState::from_vector(linalg::kron_vec(x.coeffs(), y.coeffs()))?;
    CompositeState::new((x.dim(), y.dim()), joint)
}

/// `(e_0 ⊗ e_0 + e_1 ⊗ e_1) / √2`.
pub fn bell_state() -> CompositeState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let joint = PureState::from_real(&[r, 0.0, 0.0, r]).expect("non-zero");
    CompositeState { dims: (2, 2), joint }
}

/// `1 − (1 − k_A)(1 − k_B)`.
pub fn kernel_compose(ka: f64, kb: f64) -> Result<f64> {
    for k in [ka, kb] {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::OutOfRange(k));
        }
    }
    Ok(1.0 - (1.0 - ka) * (1.0 - kb))
}

/// Worst violations of the composition-law conditions for one candidate rule.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LawViolations {
    pub boundary: f64,
    pub symmetry: f64,
    pub associativity: f64,
    /// Against the joint kernel of random product states.
    pub factorization: f64,
}

impl LawViolations {
    pub fn worst(&self) -> f64 {
        self.boundary
            .max(self.symmetry)
            .max(self.associativity)
            .max(self.factorization)
    }
}

/// Evaluates `rule` on `samples` random triples and product-state quadruples
/// at `(N_A, N_B) ∈ {(2,2), (2,3), (3,3)}`.
pub fn law_violations<F>(rule: F, samples: usize, rng: &mut RandomSource) -> Result<LawViolations>
where
    F: Fn(f64, f64) -> f64,
{
    let mut v = LawViolations { boundary: 0.0, symmetry: 0.0, associativity: 0.0, factorization: 0.0 };
    let dims = [(2, 2), (2, 3), (3, 3)];
    for i in 0..samples {
        let (x, y, z) = (rng.uniform(), rng.uniform(), rng.uniform());
        v.boundary = v
            .boundary
            .max((rule(0.0, y) - y).abs())
            .max((rule(x, 0.0) - x).abs())
            .max((rule(1.0, y) - 1.0).abs())
            .max((rule(x, 1.0) - 1.0).abs());
        v.symmetry = v.symmetry.max((rule(x, y) - rule(y, x)).abs());
        v.associativity = v
            .associativity
            .max((rule(rule(x, y), z) - rule(x, rule(y, z))).abs());

        let (na, nb) = dims[i % dims.len()];
        let a1 = state::haar_random_state(na, rng)?;
        let a2 = state::haar_random_state(na, rng)?;
        let b1 = state::haar_random_state(nb, rng)?;
        let b2 = state::haar_random_state(nb, rng)?;
        let joint = state::kernel(tensor_state(&a1, &b1)?.joint(), tensor_state(&a2, &b2)?.joint())?;
        let composed = rule(state::kernel(&a1, &a2)?, state::kernel(&b1, &b2)?);
        v.factorization = v.factorization.max((joint - composed).abs());
    }
    Ok(v)
}

/// The composition law checked against the reference rule and against the
/// deliberately wrong candidate `max`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompositionLawReport {
    pub samples: usize,
    pub law: LawViolations,
    pub max_candidate: LawViolations,
}

/// Separation required before the `max` candidate counts as rejected.
pub const CANDIDATE_REJECTION: f64 = 1e-3;

pub fn composition_law_tests(samples: usize, rng: &mut RandomSource) -> Result<CompositionLawReport> {
    if samples < 100 {
        return Err(Error::InvalidParameters(format!("samples {samples} < 100")));
    }
    let law = law_violations(|a, b| 1.0 - (1.0 - a) * (1.0 - b), samples, &mut rng.derive("law"))?;
    let max_candidate = law_violations(f64::max, samples, &mut rng.derive("max"))?;
    Ok(CompositionLawReport { samples, law, max_candidate })
}

impl CompositionLawReport {
    pub fn to_reports(&self) -> Vec<CheckReport> {
        let p = || params! {"samples" => self.samples};
        vec![
            CheckReport::at_most("compose.law.boundary", p(), self.law.boundary, TOL_ALG),
            CheckReport::at_most("compose.law.symmetry", p(), self.law.symmetry, TOL_ALG),
            CheckReport::at_most("compose.law.associativity", p(), self.law.associativity, TOL_ALG),
            CheckReport::at_most("compose.law.factorization", p(), self.law.factorization, TOL_ALG),
            CheckReport::at_least(
                "compose.law.max_candidate_rejected",
                p(),
                self.max_candidate.worst(),
                CANDIDATE_REJECTION,
            ),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TomographyRank {
    pub rank: usize,
    pub full_dimension: usize,
    pub products: usize,
}

fn local_operator_basis(n: usize, field: Field) -> Vec<CMat> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut ops = Vec::new();
    for j in 0..n {
        let mut m = CMat::zeros(n, n);
        m[(j, j)] = ONE;
        ops.push(m);
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = CMat::zeros(n, n);
            sym[(j, k)] = Complex64::new(r, 0.0);
            sym[(k, j)] = Complex64::new(r, 0.0);
            ops.push(sym);
            if field == Field::Complex {
                let mut anti = CMat::zeros(n, n);
                anti[(j, k)] = Complex64::new(0.0, r);
                anti[(k, j)] = Complex64::new(0.0, -r);
                ops.push(anti);
            }
        }
    }
    ops
}

/// Rank of the span of `A ⊗ B` over local Hermitian (complex) or real
/// symmetric (real) operator bases, against the dimension of the joint
/// operator space.
pub fn local_tomography_rank(na: usize, nb: usize, field: Field) -> Result<TomographyRank> {
    for n in [na, nb] {
        if n < 2 {
            return Err(Error::DimensionTooSmall { got: n, min: 2 });
        }
        if n > 4 {
            return Err(Error::DimensionTooLarge(n));
        }
    }
    let d = na * nb;
    let la = local_operator_basis(na, field);
    let lb = local_operator_basis(nb, field);
    let cols = match field {
        Field::Complex => 2 * d * d,
        Field::Real => d * d,
    };
    let products = la.len() * lb.len();
    let mut m = DMatrix::<f64>::zeros(products, cols);
    let mut row = 0;
    for a in &la {
        for b in &lb {
            let op = linalg::kron(a, b);
            for (i, z) in op.iter().enumerate() {
                m[(row, i)] = z.re;
                if field == Field::Complex {
                    m[(row, d * d + i)] = z.im;
                }
            }
            row += 1;
        }
    }
    let full_dimension = match field {
        Field::Complex => d * d,
        Field::Real => d * (d + 1) / 2,
    };
    Ok(TomographyRank {
        rank: linalg::numerical_rank(&m, 1e-9),
        full_dimension,
        products,
    })
}

/// `{cos θ e_0 + sin θ e_1, −sin θ e_0 + cos θ e_1}`.
pub fn equatorial_basis(theta: f64) -> Basis {
    let (s, c) = theta.sin_cos();
    Basis::from_columns(&CMat::from_row_slice(
        2,
        2,
        &[Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ))
    .expect("rotation is orthonormal")
}

/// `E(a, b) = Σ_{ij} (−1)^{i+j} p_{ij}` from affinities of the product basis.
pub fn correlator(state: &CompositeState, a: f64, b: f64) -> Result<f64> {
    if state.joint.dim() != 4 || state.dims != (2, 2) {
        return Err(Error::DimensionMismatch { left: 4, right: state.joint.dim() });
    }
    let ba = equatorial_basis(a);
    let bb = equatorial_basis(b);
    let mut e = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let prod = tensor_state(ba.vector(i), bb.vector(j))?;
            let p = 1.0 - state::kernel(state.joint(), prod.joint())?;
            e += if (i + j) % 2 == 0 { p } else { -p };
        }
    }
    Ok(e)
}

/// `S = E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`, angles ordered `[a, a′, b, b′]`.
pub fn chsh_value(state: &CompositeState, angles: [f64; 4]) -> Result<f64> {
    let [a, a2, b, b2] = angles;
    Ok(correlator(state, a, b)? + correlator(state, a, b2)? + correlator(state, a2, b)?
        - correlator(state, a2, b2)?)
}

/// Max `|S|` over all deterministic ±1 outcome tables.
pub fn deterministic_chsh_max() -> f64 {
    let mut best: f64 = 0.0;
    for bits in 0u8..16 {
        let v = |k: u8| -> f64 { if bits >> k & 1 == 1 { 1.0 } else { -1.0 } };
        let (a, a2, b, b2) = (v(0), v(1), v(2), v(3));
        best = best.max((a * b + a * b2 + a2 * b - a2 * b2).abs());
    }
    best
}

/// System ⊗ apparatus interaction completing `s_k ⊗ a_0 ↦ s_k ⊗ a_k` as the
/// controlled shift `|k, m> ↦ |k, m + k mod N>`.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    n: usize,
    interaction: Unitary,
}

impl MeasurementModel {
    pub fn new(n: usize) -> Result<Self> {
        state::check_dim(n * n)?;
        let d = n * n;
        let mut m = CMat::zeros(d, d);
        for k in 0..n {
            for a in 0..n {
                m[(k * n + (a + k) % n, k * n + a)] = ONE;
            }
        }
        Ok(Self { n, interaction: Unitary::new(m)? })
    }

    pub fn interaction(&self) -> &Unitary {
        &self.interaction
    }

    /// Max `‖U(s_k ⊗ a_0) − s_k ⊗ a_k‖`.
    pub fn calibration_defect(&self) -> Result<f64> {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let s = PureState::basis_state(n, k)?;
            let ready = tensor_state(&s, &PureState::basis_state(n, 0)?)?;
            let pointer = tensor_state(&s, &PureState::basis_state(n, k)?)?;
            let out = self.interaction.matrix() * ready.joint().coeffs();
            worst = worst.max(linalg::norm_sqr(&(out - pointer.joint().coeffs())).sqrt());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub joint: CompositeState,
    /// `1 − K(Φ, s_k ⊗ a_k)` per branch.
    pub branch_affinities: Vec<f64>,
}

pub fn measurement_interaction(psi: &PureState, n: usize) -> Result<MeasurementOutcome> {
    if psi.dim() != n {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: n });
    }
    let model = MeasurementModel::new(n)?;
    let ready = tensor_state(psi, &PureState::basis_state(n, 0)?)?;
    let joint = CompositeState::new((n, n), model.interaction().apply(ready.joint())?)?;
    let branch_affinities = (0..n)
        .map(|k| {
            let s = PureState::basis_state(n, k)?;
            let branch = tensor_state(&s, &s)?;
            Ok(1.0 - state::kernel(joint.joint(), branch.joint())?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementOutcome { joint, branch_affinities })
}

/// `|s − s²|`: how far a cloner would have to move the overlap `s`.
pub fn no_cloning_gap(s: Complex64) -> Result<f64> {
    if s.norm() > 1.0 + TOL_ALG {
        return Err(Error::OutOfRange(s.norm()));
    }
    Ok((s - s * s).norm())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropicOutcome {
    pub entropy_first: f64,
    pub entropy_second: f64,
    pub sum: f64,
    /// `log2 N`.
    pub bound: f64,
}

pub fn entropic_uncertainty_check(psi: &PureState, b: &Basis, b2: &Basis) -> Result<EntropicOutcome> {
    let dev = mub::pair_deviation(b, b2)?;
    if dev > TOL_ALG {
        return Err(Error::NotUnbiased(dev));
    }
    let entropy_first = linalg::shannon_bits(&state::affinities(psi, b)?);
    let entropy_second = linalg::shannon_bits(&state::affinities(psi, b2)?);
    Ok(EntropicOutcome {
        entropy_first,
        entropy_second,
        sum: entropy_first + entropy_second,
        bound: (psi.dim() as f64).log2(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DilutionRecord {
    pub n_system: usize,
    pub n_environment: usize,
    pub n_eff: usize,
    /// `2π / N_eff` radians.
    pub delta_phi: f64,
    pub delta_phi_degrees: f64,
    /// `N_eff >= 3`.
    pub dynamics_nontrivial: bool,
}

pub fn capacity_dilution(n_system: usize, n_environment: usize) -> Result<DilutionRecord> {
    if n_system < 1 || n_environment < 1 {
        return Err(Error::InvalidParameters(format!(
            "need N_S, N_E >= 1, got {n_system}, {n_environment}"
        )));
    }
    let n_eff = n_system
        .checked_mul(n_environment)
        .ok_or_else(|| Error::Overflow("N_S · N_E".into()))?;
    let delta_phi = TAU / n_eff as f64;
    Ok(DilutionRecord {
        n_system,
        n_environment,
        n_eff,
        delta_phi,
        delta_phi_degrees: delta_phi.to_degrees(),
        dynamics_nontrivial: n_eff >= 3,
    })
}
