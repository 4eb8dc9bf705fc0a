//! Finite-capacity floors and two-basis reconstruction: phase granularity,
//! operational indistinguishability, phase retrieval from two unbiased
//! bases, the entropy floor and the Zeno floor.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Hamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::mub;
use crate::random::RandomSource;
use crate::state::{self, Basis, PureState};
use crate::TOL_ALG;

/// Misfit norm below which a phase assignment reproduces the data.
pub const RECON_TOL: f64 = 1e-9;
/// Grid points per free phase in the multi-start.
pub const PHASE_GRID: usize = 16;
/// Cap on multi-start points; above it a Kronecker sequence replaces the grid.
pub const MAX_STARTS: usize = 4096;
/// Fidelity above which two candidates are the same state.
pub const SAME_STATE_FIDELITY: f64 = 1.0 - 1e-8;
/// Kernel above which two states with matching data count as distinct.
pub const AUDIT_TOL: f64 = 1e-6;
/// Affinity agreement that counts as "identical data".
pub const AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GranularityRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta_theta: f64,
    pub min_time_step: f64,
    pub energy_ceiling: f64,
}

pub fn granularity(n: usize, period: f64) -> Result<GranularityRecord> {
    if n < 1 || !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameters(format!("need N >= 1 and T > 0, got {n}, {period}")));
    }
    let nf = n as f64;
    Ok(GranularityRecord {
        n,
        delta_theta: TAU / nf,
        min_time_step: period / nf,
        energy_ceiling: nf * TAU / period,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndistinguishabilityRecord {
    pub trials: usize,
    pub epsilon: f64,
    /// `2 / N`.
    pub bound: f64,
    pub max_kernel: f64,
    pub max_component_shift: f64,
    pub kernel_violations: usize,
    /// Trials breaking `|<ψ|ψ'>| >= 1 − Σ|c_k − c'_k|²`.
    pub overlap_violations: usize,
}

/// Perturbs every amplitude by at most `epsilon` after renormalization and
/// checks `K(ψ, ψ') <= 2/N`.
pub fn indistinguishability_bound_check(
    psi: &PureState,
    epsilon: f64,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<IndistinguishabilityRecord> {
    let n = psi.dim();
    if !(0.0..1.0 / n as f64).contains(&epsilon) {
        return Err(Error::InvalidParameters(format!("epsilon {epsilon} not in [0, 1/{n})")));
    }
    let c = psi.coeffs();
    let mut rec = IndistinguishabilityRecord {
        trials,
        epsilon,
        bound: 2.0 / n as f64,
        max_kernel: 0.0,
        max_component_shift: 0.0,
        kernel_violations: 0,
        overlap_violations: 0,
    };
    for _ in 0..trials {
        let mut delta = CVec::from_fn(n, |_, _| {
            let r = epsilon * rng.uniform().sqrt();
            Complex64::from_polar(r, rng.uniform_range(0.0, TAU))
        });
        let mut accepted = None;
        for _ in 0..64 {
            let raw = c + &delta;
            let v = &raw / Complex64::new(linalg::norm_sqr(&raw).sqrt(), 0.0);
            let d = &v - c;
            if d.iter().all(|z| z.norm() <= epsilon) {
                accepted = Some((v, d));
                break;
            }
            delta /= Complex64::new(2.0, 0.0);
        }
        let (shifted, d) = accepted.unwrap_or_else(|| (c.clone(), CVec::zeros(n)));
        let shift = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let k = state::kernel(psi, &PureState::from_vector(shifted.clone())?)?;
        let overlap = linalg::inner(c, &shifted).norm();
        rec.max_kernel = rec.max_kernel.max(k);
        rec.max_component_shift = rec.max_component_shift.max(shift);
        if k > rec.bound {
            rec.kernel_violations += 1;
        }
        if overlap < 1.0 - linalg::norm_sqr(&d) - TOL_ALG {
            rec.overlap_violations += 1;
        }
    }
    Ok(rec)
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    #[serde(serialize_with = "serialize_state")]
    pub state: PureState,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    /// Lowest-residual candidate.
    #[serde(serialize_with = "serialize_state")]
    pub estimate: PureState,
    pub residual: f64,
    /// Distinct states reproducing the data within `RECON_TOL`.
    pub candidates: Vec<Candidate>,
    /// More than one distinct candidate.
    pub ambiguous: bool,
    pub starts: usize,
}

fn serialize_state<S: serde::Serializer>(psi: &PureState, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(complex_pairs(psi.coeffs()))
}

/// `[re, im]` per amplitude.
pub fn complex_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn check_probabilities(p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch { left: p.len(), right: n });
    }
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&x| x < -TOL_ALG || !x.is_finite()) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameters(format!("not a probability vector: {p:?}")));
    }
    Ok(())
}

/// Misfit model for phases on the support of `p_B`.
struct PhaseModel {
    /// `M_{jk} r_k` restricted to the support, column 0 the fixed-phase amplitude.
    weighted: CMat,
    observed: DVector<f64>,
}

impl PhaseModel {
    fn amplitudes(&self, phases: &[f64]) -> CVec {
        let mut a = self.weighted.column(0).into_owned();
        for (i, &ph) in phases.iter().enumerate() {
            a += self.weighted.column(i + 1) * Complex64::from_polar(1.0, ph);
        }
        a
    }

    fn residual(&self, phases: &[f64]) -> DVector<f64> {
        let a = self.amplitudes(phases);
        DVector::from_fn(a.len(), |j, _| a[j].norm_sqr() - self.observed[j])
    }

    fn jacobian(&self, phases: &[f64]) -> DMatrix<f64> {
        let a = self.amplitudes(phases);
        DMatrix::from_fn(a.len(), phases.len(), |j, i| {
            let dz = self.weighted[(j, i + 1)] * Complex64::from_polar(1.0, phases[i]) * linalg::I;
            2.0 * (a[j].conj() * dz).re
        })
    }

    /// Levenberg–Marquardt from `start`; returns phases and the misfit norm.
    fn refine(&self, start: Vec<f64>) -> (Vec<f64>, f64) {
        let mut x = start;
        let mut r = self.residual(&x);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..200 {
            if cost < 1e-30 {
                break;
            }
            let j = self.jacobian(&x);
            let jt = j.transpose();
            let g = &jt * &r;
            let mut a = &jt * &j;
            let diag = a.diagonal();
            for i in 0..x.len() {
                a[(i, i)] += lambda * diag[i].max(1e-12);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-g));
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rt = self.residual(&trial);
            let ct = rt.norm_squared();
            if ct < cost {
                let small = step.norm() < 1e-15;
                x = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                if small {
                    break;
                }
            } else {
                lambda *= 4.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
        (x, cost.sqrt())
    }
}

fn start_points(free: usize) -> Vec<Vec<f64>> {
    if free == 0 {
        return vec![Vec::new()];
    }
    let full = PHASE_GRID.checked_pow(free as u32).filter(|&s| s <= MAX_STARTS);
    match full {
        Some(count) => (0..count)
            .map(|mut s| {
                (0..free)
                    .map(|_| {
                        let g = s % PHASE_GRID;
                        s /= PHASE_GRID;
                        TAU * g as f64 / PHASE_GRID as f64
                    })
                    .collect()
            })
            .collect(),
        None => {
            // Kronecker sequence with generators sqrt(p) mod 1.
            let gens: Vec<f64> = (2..)
                .filter(|&p| mub::is_prime(p))
                .take(free)
                .map(|p| (p as f64).sqrt().fract())
                .collect();
            (0..MAX_STARTS)
                .map(|s| gens.iter().map(|g| TAU * (0.5 + s as f64 * g).fract()).collect())
                .collect()
        }
    }
}

/// Recovers a state from its affinities in two unbiased bases. Moduli come
/// from `p_b`; relative phases minimize the misfit to `p_b2` from a
/// multi-start grid refined by Levenberg–Marquardt.
pub fn reconstruct_from_two_bases(p_b: &[f64], p_b2: &[f64], b: &Basis, b2: &Basis) -> Result<Reconstruction> {
    let n = b.dim();
    if b2.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: b2.dim() });
    }
    check_probabilities(p_b, n)?;
    check_probabilities(p_b2, n)?;
    let dev = mub::pair_deviation(b, b2)?;
    if dev > TOL_ALG {
        return Err(Error::NotUnbiased(dev));
    }
    let support: Vec<usize> = (0..n).filter(|&k| p_b[k].max(0.0).sqrt() > TOL_ALG).collect();
    let overlaps = b2.matrix().adjoint() * b.matrix();
    let weighted = CMat::from_fn(n, support.len(), |j, i| {
        overlaps[(j, support[i])] * p_b[support[i]].max(0.0).sqrt()
    });
    let model = PhaseModel { weighted, observed: DVector::from_column_slice(p_b2) };
    let starts = start_points(support.len() - 1);
    let basis_matrix = b.matrix();

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut best: Option<Candidate> = None;
    let n_starts = starts.len();
    for start in starts {
        let (phases, residual) = model.refine(start);
        let mut coords = CVec::zeros(n);
        coords[support[0]] = Complex64::new(p_b[support[0]].sqrt(), 0.0);
        for (i, &k) in support[1..].iter().enumerate() {
            coords[k] = Complex64::from_polar(p_b[k].max(0.0).sqrt(), phases[i]);
        }
        let psi = PureState::from_vector(&basis_matrix * coords)?;
        let cand = Candidate { state: psi, residual };
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(cand.clone());
        }
        if residual < RECON_TOL {
            match candidates.iter_mut().find(|c| fidelity(&c.state, &cand.state) > SAME_STATE_FIDELITY) {
                Some(c) if residual < c.residual => *c = cand,
                Some(_) => {}
                None => candidates.push(cand),
            }
        }
    }
    let best = best.expect("at least one start");
    if candidates.is_empty() {
        return Err(Error::InfeasibleData { residual: best.residual });
    }
    Ok(Reconstruction {
        estimate: best.state,
        residual: best.residual,
        ambiguous: candidates.len() > 1,
        candidates,
        starts: n_starts,
    })
}

/// `|<x|y>|²`.
pub fn fidelity(x: &PureState, y: &PureState) -> f64 {
    linalg::inner(x.coeffs(), y.coeffs()).norm_sqr()
}

#[derive(Debug, Clone, Serialize)]
pub struct FlaggedCase {
    pub trial: usize,
    #[serde(serialize_with = "serialize_state")]
    pub truth: PureState,
    pub p_b: Vec<f64>,
    pub p_b2: Vec<f64>,
    pub estimate_fidelity: f64,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionSweep {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    /// Estimates with fidelity above `1 − 1e-8`.
    pub high_fidelity: usize,
    pub flagged: usize,
    pub infeasible: usize,
    /// Lowest estimate fidelity among unflagged trials.
    pub min_unflagged_fidelity: f64,
    /// Trials where some candidate matches the true state.
    pub truth_among_candidates: usize,
    pub cases: Vec<FlaggedCase>,
}

impl ReconstructionSweep {
    pub fn high_fidelity_fraction(&self) -> f64 {
        self.high_fidelity as f64 / self.trials.max(1) as f64
    }
}

/// Reconstructs Haar-random states from exact data in the first two bases
/// of the standard unbiased family. Trial `i` draws from `rng.split(i)`.
pub fn reconstruction_sweep(n: usize, trials: usize, rng: &RandomSource) -> Result<ReconstructionSweep> {
    let family = mub::mub_family(n)?;
    let (b, b2) = (family.basis(0), family.basis(1));
    let mut sweep = ReconstructionSweep {
        n,
        trials,
        high_fidelity: 0,
        flagged: 0,
        infeasible: 0,
        min_unflagged_fidelity: 1.0,
        truth_among_candidates: 0,
        cases: Vec::new(),
    };
    for trial in 0..trials {
        let truth = state::haar_random_state(n, &mut rng.split(trial as u64))?;
        let p_b = state::affinities(&truth, b)?;
        let p_b2 = state::affinities(&truth, b2)?;
        match reconstruct_from_two_bases(&p_b, &p_b2, b, b2) {
            Ok(rec) => {
                let f = fidelity(&truth, &rec.estimate);
                if f > SAME_STATE_FIDELITY {
                    sweep.high_fidelity += 1;
                }
                if rec.candidates.iter().any(|c| fidelity(&truth, &c.state) > SAME_STATE_FIDELITY) {
                    sweep.truth_among_candidates += 1;
                }
                if rec.ambiguous {
                    sweep.flagged += 1;
                    sweep.cases.push(FlaggedCase {
                        trial,
                        truth,
                        p_b,
                        p_b2,
                        estimate_fidelity: f,
                        candidates: rec.candidates,
                    });
                } else {
                    sweep.min_unflagged_fidelity = sweep.min_unflagged_fidelity.min(f);
                }
            }
            Err(Error::InfeasibleData { .. }) => {
                sweep.infeasible += 1;
                sweep.flagged += 1;
                sweep.cases.push(FlaggedCase {
                    trial,
                    truth,
                    p_b,
                    p_b2,
                    estimate_fidelity: 0.0,
                    candidates: Vec::new(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmbiguousPair {
    pub theta: f64,
    pub phi: f64,
    pub phi_partner: f64,
    pub kernel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct N2AmbiguityScan {
    pub step: f64,
    pub points: usize,
    pub ambiguous_pairs: usize,
    /// Ambiguous pairs related by `φ ↦ 2π − φ`.
    pub mirror_pairs: usize,
    pub max_kernel: f64,
    pub example: Option<AmbiguousPair>,
}

/// Grid search over the Bloch sphere, `ψ = (cos θ/2, e^{iφ} sin θ/2)`, for
/// distinct states with equal affinities in the Z and X bases.
pub fn n2_ambiguity_scan(step: f64) -> Result<N2AmbiguityScan> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidParameters(format!("step {step} not in (0, 0.1]")));
    }
    let n_theta = (PI / step).round() as usize;
    let n_phi = (TAU / step).round() as usize;
    let mut scan = N2AmbiguityScan {
        step,
        points: (n_theta + 1) * n_phi,
        ambiguous_pairs: 0,
        mirror_pairs: 0,
        max_kernel: 0.0,
        example: None,
    };
    let phis: Vec<f64> = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n_phi);
    for i in 0..=n_theta {
        let theta = PI * i as f64 / n_theta as f64;
        let (s, c) = (theta / 2.0).sin_cos();
        order.clear();
        // p_X(+) = (1 + sin θ cos φ) / 2; p_Z depends on θ only.
        order.extend(phis.iter().enumerate().map(|(j, &phi)| ((1.0 + theta.sin() * phi.cos()) / 2.0, j)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for w in order.windows(2) {
            if (w[1].0 - w[0].0).abs() > AGREEMENT_TOL {
                continue;
            }
            let (ja, jb) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            let dphi = phis[jb] - phis[ja];
            let overlap = Complex64::new(c * c, 0.0) + Complex64::from_polar(s * s, dphi);
            let kernel = 1.0 - overlap.norm_sqr();
            if kernel <= AUDIT_TOL {
                continue;
            }
            scan.ambiguous_pairs += 1;
            if (ja + jb) % n_phi == 0 {
                scan.mirror_pairs += 1;
            }
            scan.max_kernel = scan.max_kernel.max(kernel);
            if scan.example.is_none() {
                scan.example = Some(AmbiguousPair { theta, phi: phis[ja], phi_partner: phis[jb], kernel });
            }
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyFloor {
    #[serde(rename = "N")]
    pub n: usize,
    /// `(log2 N) / N` bits.
    pub floor: f64,
    /// `H(1 − 1/N, 1/N)` bits.
    pub operational: f64,
    pub ratio: f64,
}

pub fn entropy_floor_check(n: usize) -> Result<EntropyFloor> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    let nf = n as f64;
    let floor = nf.log2() / nf;
    let operational = linalg::shannon_bits(&[1.0 - 1.0 / nf, 1.0 / nf]);
    Ok(EntropyFloor { n, floor, operational, ratio: operational / floor })
}

/// Per-step flip probability `K(ψ, e^{−iH δt} ψ)` for `ψ = (e_0 + e_1)/√2`
/// in dimension `N`, `H = diag(0, ΔE, 0, …)`, `δt = T/N`.
pub fn zeno_flip_probability(n: usize, delta_e: f64, period: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { got: n, min: 3 });
    }
    if !(delta_e >= 0.0) || !(period > 0.0) {
        return Err(Error::InvalidParameters(format!("need ΔE >= 0, T > 0, got {delta_e}, {period}")));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi = state::embed(&[Complex64::new(r, 0.0), Complex64::new(r, 0.0)], n)?;
    let mut h = CMat::zeros(n, n);
    h[(1, 1)] = Complex64::new(delta_e, 0.0);
    let step = granularity(n, period)?.min_time_step;
    let evolved = Hamiltonian::new(h)?.evolve(step).apply(&psi)?;
    state::kernel(&psi, &evolved)
}

pub const ZENO_DIMENSIONS: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, Serialize)]
pub struct ZenoFit {
    pub dimensions: Vec<usize>,
    pub probabilities: Vec<f64>,
    /// Least-squares slope of `ln P` against `ln N`.
    pub exponent: f64,
}

pub fn zeno_floor_sim(delta_e: f64, period: f64) -> Result<ZenoFit> {
    let probabilities = ZENO_DIMENSIONS
        .iter()
        .map(|&n| zeno_flip_probability(n, delta_e, period))
        .collect::<Result<Vec<_>>>()?;
    if probabilities.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidParameters("flip probability vanishes; no scaling to fit".into()));
    }
    let xs: Vec<f64> = ZENO_DIMENSIONS.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = probabilities.iter().map(|p| p.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ZenoFit { dimensions: ZENO_DIMENSIONS.to_vec(), probabilities, exponent: sxy / sxx })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSource {
    Random,
    Constructed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub source: PairSource,
    #[serde(serialize_with = "serialize_state")]
    pub x: PureState,
    #[serde(serialize_with = "serialize_state")]
    pub y: PureState,
    pub affinity_gap: f64,
    pub kernel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub random_agreements: usize,
    pub random_counterexamples: usize,
    pub constructed_pairs: usize,
    pub constructed_counterexamples: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl AuditSummary {
    pub fn counterexample_count(&self) -> usize {
        self.counterexamples.len()
    }
}

/// Number of trials that also seed a constructed pair from reconstruction.
pub const CONSTRUCTED_TRIALS: usize = 20;

fn affinity_gap(x: &PureState, y: &PureState, b: &Basis, b2: &Basis) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for basis in [b, b2] {
        let (px, py) = (state::affinities(x, basis)?, state::affinities(y, basis)?);
        for (a, c) in px.iter().zip(&py) {
            gap = gap.max((a - c).abs());
        }
    }
    Ok(gap)
}

/// Tests whether equal affinities in two fixed unbiased bases force equal
/// states. Random pairs are drawn independently; constructed pairs take a
/// random state and every other state that reconstruction finds for its data.
pub fn two_basis_sufficiency_audit(n: usize, trials: usize, rng: &RandomSource) -> Result<AuditSummary> {
    if ![2, 3, 5].contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let family = mub::mub_family(n)?;
    let (b, b2) = (family.basis(0), family.basis(1));
    let mut summary = AuditSummary {
        n,
        trials,
        random_agreements: 0,
        random_counterexamples: 0,
        constructed_pairs: 0,
        constructed_counterexamples: 0,
        counterexamples: Vec::new(),
    };
    for trial in 0..trials {
        let mut r = rng.derive("random").split(trial as u64);
        let x = state::haar_random_state(n, &mut r)?;
        let y = state::haar_random_state(n, &mut r)?;
        let gap = affinity_gap(&x, &y, b, b2)?;
        if gap <= AGREEMENT_TOL {
            summary.random_agreements += 1;
            let kernel = state::kernel(&x, &y)?;
            if kernel >= AUDIT_TOL {
                summary.random_counterexamples += 1;
                summary.counterexamples.push(Counterexample {
                    trial,
                    source: PairSource::Random,
                    x,
                    y,
                    affinity_gap: gap,
                    kernel,
                });
            }
        }
    }
    for trial in 0..trials.min(CONSTRUCTED_TRIALS) {
        let x = state::haar_random_state(n, &mut rng.derive("constructed").split(trial as u64))?;
        let rec = reconstruct_from_two_bases(&state::affinities(&x, b)?, &state::affinities(&x, b2)?, b, b2)?;
        for cand in rec.candidates {
            let kernel = state::kernel(&x, &cand.state)?;
            if kernel < AUDIT_TOL {
                continue;
            }
            summary.constructed_pairs += 1;
            let gap = affinity_gap(&x, &cand.state, b, b2)?;
            if gap <= AGREEMENT_TOL {
                summary.constructed_counterexamples += 1;
                summary.counterexamples.push(Counterexample {
                    trial,
                    source: PairSource::Constructed,
                    x: x.clone(),
                    y: cand.state,
                    affinity_gap: gap,
                    kernel,
                });
            }
        }
    }
    summary.counterexamples.sort_by_key(|c| (c.trial, c.source));
    Ok(summary)
}
