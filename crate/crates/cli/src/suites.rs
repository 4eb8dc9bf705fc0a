//! Verification suites. Each suite is a list of independent tasks; a task
//! owns its random stream and returns reports plus optional data artifacts.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use caplab_core::capacity::{self, Bound};
use caplab_core::composition::{self, Field};
use caplab_core::dynamics;
use caplab_core::{
    geometry, linalg, mub, params, sampling, state, CheckReport, Comparator, DensityOperator, PureState,
    RandomSource, Result, C64, TOL_ALG,
};
use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kernel,
    Dynamics,
    Mub,
    Born,
    Capacity,
    Compose,
    Sampling,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 7] = [
        Suite::Kernel,
        Suite::Dynamics,
        Suite::Mub,
        Suite::Born,
        Suite::Capacity,
        Suite::Compose,
        Suite::Sampling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Dynamics => "dynamics",
            Suite::Mub => "mub",
            Suite::Born => "born",
            Suite::Capacity => "capacity",
            Suite::Compose => "compose",
            Suite::Sampling => "sampling",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::CONCRETE.to_vec(),
            s => vec![s],
        }
    }

    pub fn tasks(self) -> Vec<Task> {
        let list: &[Task] = match self {
            Suite::Kernel => &KERNEL,
            Suite::Dynamics => &DYNAMICS,
            Suite::Mub => &MUB,
            Suite::Born => &BORN,
            Suite::Capacity => &CAPACITY,
            Suite::Compose => &COMPOSE,
            Suite::Sampling => &SAMPLING,
            Suite::All => return Self::CONCRETE.iter().flat_map(|s| s.tasks()).collect(),
        };
        list.to_vec()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> std::result::Result<Self, CliError> {
        <Suite as ValueEnum>::from_str(s, false).map_err(|_| CliError::UnknownSuite(s.to_owned()))
    }
}

/// Optional overrides from the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Settings {
    pub n: Option<usize>,
    pub m: Option<u64>,
    pub samples: Option<usize>,
    pub alpha: Option<f64>,
}

impl Settings {
    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

#[derive(Debug, Default)]
pub struct TaskOutput {
    pub reports: Vec<CheckReport>,
    pub artifacts: Vec<(String, serde_json::Value)>,
}

impl TaskOutput {
    fn push(&mut self, r: CheckReport) {
        self.reports.push(r);
    }

    fn artifact<T: Serialize>(&mut self, name: &str, value: &T) {
        let v = serde_json::to_value(value).expect("artifact serializes");
        self.artifacts.push((name.to_owned(), v));
    }
}

pub type TaskFn = fn(&Settings, &mut RandomSource) -> Result<TaskOutput>;

#[derive(Clone, Copy)]
pub struct Task {
    pub name: &'static str,
    pub run: TaskFn,
}

impl fmt::Debug for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

const fn task(name: &'static str, run: TaskFn) -> Task {
    Task { name, run }
}

fn within(name: &str, p: caplab_core::Params, value: f64, bound: f64, tol: f64) -> CheckReport {
    CheckReport::new(name, p, value, bound, Comparator::Approx, tol)
}

// ---------------------------------------------------------------- kernel

const KERNEL: [Task; 3] = [
    task("kernel.axioms", kernel_axioms),
    task("kernel.extensions", kernel_extensions),
    task("kernel.haar_mean", kernel_haar_mean),
];

fn kernel_axioms(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(200);
    for n in s.dims(&[2, 3, 5]) {
        let (mut sym, mut ident, mut inv, mut range): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..samples {
            let x = state::haar_random_state(n, rng)?;
            let y = state::haar_random_state(n, rng)?;
            let u = state::haar_random_unitary(n, rng)?;
            let k = state::kernel(&x, &y)?;
            sym = sym.max((k - state::kernel(&y, &x)?).abs());
            ident = ident.max(state::kernel(&x, &x)?);
            inv = inv.max((state::kernel(&u.apply(&x)?, &u.apply(&y)?)? - k).abs());
            let raw = 1.0 - linalg::inner(x.coeffs(), y.coeffs()).norm_sqr();
            range = range.max(-raw).max(raw - 1.0);
        }
        let p = || params! {"N" => n, "samples" => samples};
        out.push(CheckReport::at_most("kernel.symmetry", p(), sym, TOL_ALG));
        out.push(CheckReport::at_most("kernel.identity", p(), ident, TOL_ALG));
        out.push(CheckReport::at_most("kernel.unitary_invariance", p(), inv, TOL_ALG));
        out.push(CheckReport::at_most("kernel.range_excess", p(), range.max(0.0), TOL_ALG));
    }
    Ok(out)
}

fn kernel_extensions(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    for n in s.dims(&[2, 3, 5]) {
        let mut ortho: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let k = state::kernel(&PureState::basis_state(n, i)?, &PureState::basis_state(n, j)?)?;
                    ortho = ortho.max((k - 1.0).abs());
                }
            }
        }
        let mut pure_gap: f64 = 0.0;
        let mut mixed_gap: f64 = 0.0;
        let mixed = DensityOperator::maximally_mixed(n)?;
        for _ in 0..50 {
            let x = state::haar_random_state(n, rng)?;
            let z = state::haar_random_state(n, rng)?;
            pure_gap =
                pure_gap.max((state::mixed_kernel(&DensityOperator::from_pure(&x), &z)? - state::kernel(&x, &z)?).abs());
            mixed_gap = mixed_gap.max((state::mixed_kernel(&mixed, &z)? - (1.0 - 1.0 / n as f64)).abs());
        }
        let p = || params! {"N" => n};
        out.push(CheckReport::at_most("kernel.basis_orthogonality", p(), ortho, TOL_ALG));
        out.push(CheckReport::at_most("kernel.mixed_reduces_to_pure", p(), pure_gap, TOL_ALG));
        out.push(CheckReport::at_most("kernel.maximally_mixed", p(), mixed_gap, TOL_ALG));
    }
    Ok(out)
}

fn kernel_haar_mean(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(2000);
    for n in s.dims(&[2, 3, 5]) {
        let mut sum = 0.0;
        for _ in 0..samples {
            sum += state::kernel(&state::haar_random_state(n, rng)?, &state::haar_random_state(n, rng)?)?;
        }
        let nf = n as f64;
        // |<x|y>|² ~ Beta(1, N−1) for independent Haar states.
        let sd = ((nf - 1.0) / (nf * nf * (nf + 1.0)) / samples as f64).sqrt();
        out.push(within(
            "kernel.haar_mean",
            params! {"N" => n, "samples" => samples},
            sum / samples as f64,
            1.0 - 1.0 / nf,
            5.0 * sd,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- dynamics

const DYNAMICS: [Task; 6] = [
    task("dynamics.cyclic", dynamics_cyclic),
    task("dynamics.interpolation", dynamics_interpolation),
    task("dynamics.cycle_uniformity", dynamics_uniformity),
    task("dynamics.n2_obstruction", dynamics_obstruction),
    task("dynamics.complex_family", dynamics_complex_family),
    task("dynamics.holonomy", dynamics_holonomy),
];

fn dynamics_cyclic(s: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    for n in s.dims(&(2..=12).collect::<Vec<_>>()) {
        let g = dynamics::cyclic_generator(n)?;
        let closure = g.power_deviation(n as u32);
        let proper = (1..n as u32).map(|k| g.power_deviation(k)).fold(f64::INFINITY, f64::min);
        let p = || params! {"N" => n};
        out.push(CheckReport::at_most("dynamics.cyclic.order", p(), closure, 1e-10));
        out.push(CheckReport::new("dynamics.cyclic.minimal_order", p(), proper, 1.0, Comparator::AtLeast, TOL_ALG));
        out.push(CheckReport::at_most("dynamics.cyclic.roots_of_unity", p(), g.roots_of_unity_defect(), 1e-10));
    }
    Ok(out)
}

fn dynamics_interpolation(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(50);
    let period = 1.0;
    for n in s.dims(&[2, 3, 5, 8, 12]) {
        let g = dynamics::cyclic_generator(n)?;
        let fam = dynamics::interpolate_evolution(&g, period)?;
        let ham = dynamics::hamiltonian_from_cycle(&fam);
        let (mut group, mut orbit, mut gen): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..samples {
            let (a, b) = (rng.uniform_range(-2.0, 2.0), rng.uniform_range(-2.0, 2.0));
            let lhs = fam.evaluate(a).compose(&fam.evaluate(b))?;
            group = group.max(linalg::max_abs_diff(lhs.matrix(), fam.evaluate(a + b).matrix()));
            let x = state::haar_random_state(n, rng)?;
            let y = state::haar_random_state(n, rng)?;
            let u = fam.evaluate(a);
            orbit = orbit.max((state::kernel(&u.apply(&x)?, &u.apply(&y)?)? - state::kernel(&x, &y)?).abs());
            gen = gen.max(linalg::max_abs_diff(ham.evolve(a).matrix(), u.matrix()));
        }
        let mut steps: f64 = 0.0;
        for k in 0..=n {
            let t = k as f64 * period / n as f64;
            steps = steps.max(linalg::max_abs_diff(fam.evaluate(t).matrix(), g.unitary().pow(k as u32).matrix()));
        }
        let computational = caplab_core::Basis::computational(n)?;
        let fourier = dynamics::fourier_eigenbasis(n)?;
        let mut unbiased: f64 = 0.0;
        for b in computational.vectors() {
            for f in fourier.vectors() {
                unbiased = unbiased.max((state::kernel(b, f)? - (1.0 - 1.0 / n as f64)).abs());
            }
        }
        let p = || params! {"N" => n, "samples" => samples};
        out.push(CheckReport::at_most("dynamics.interpolation.group_law", p(), group, 1e-10));
        out.push(CheckReport::at_most(
            "dynamics.interpolation.period",
            p(),
            linalg::deviation_from_identity(fam.evaluate(period).matrix()),
            1e-10,
        ));
        out.push(CheckReport::at_most("dynamics.interpolation.integer_steps", p(), steps, 1e-10));
        out.push(CheckReport::at_most("dynamics.interpolation.kernel_preserved", p(), orbit, 1e-10));
        out.push(CheckReport::at_most("dynamics.interpolation.generator", p(), gen, 1e-10));
        out.push(CheckReport::at_most("dynamics.eigenbasis_unbiased", p(), unbiased, TOL_ALG));
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn dynamics_uniformity(s: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let dims = s.dims(&[2, 3, 4, 5]).into_iter().filter(|&n| n <= 6);
    for n in dims {
        let (mut mismatches, mut defect, mut total) = (0usize, 0.0f64, 0usize);
        for sigma in permutations(n) {
            let prof = dynamics::permutation_eigen_analysis(&sigma)?;
            let single_cycle = prof.cycle_type == [n];
            if prof.uniform != single_cycle {
                mismatches += 1;
            }
            defect = defect.max(prof.eigen_defect);
            total += 1;
        }
        let p = || params! {"N" => n, "permutations" => total};
        out.push(CheckReport::at_most("dynamics.cycle_uniformity.mismatches", p(), mismatches as f64, 0.0));
        out.push(CheckReport::at_most("dynamics.cycle_uniformity.eigen_defect", p(), defect, 1e-12));
    }
    Ok(out)
}

fn dynamics_obstruction(s: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let resolution = s.samples(400).max(100);
    let scan = dynamics::n2_obstruction_scan(resolution)?;
    let p = || params! {"resolution" => resolution};
    out.push(within("dynamics.n2_obstruction.real_solutions", p(), scan.solutions.len() as f64, 4.0, 0.0));
    out.push(CheckReport::at_most(
        "dynamics.n2_obstruction.cluster_radius",
        p(),
        scan.max_cluster_radius,
        2.0 / resolution as f64,
    ));
    out.artifact("n2_obstruction", &scan);
    Ok(out)
}

fn dynamics_complex_family(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(64).max(4);
    let c = dynamics::complex_family_check(samples, rng)?;
    let p = || params! {"samples" => samples};
    out.push(CheckReport::at_most("dynamics.complex_family.unitarity", p(), c.max_unitarity_defect, TOL_ALG));
    out.push(CheckReport::at_most("dynamics.complex_family.commutes_with_swap", p(), c.max_commutator, TOL_ALG));
    out.push(CheckReport::at_most("dynamics.complex_family.kernel_change", p(), c.max_kernel_change, TOL_ALG));
    out.push(CheckReport::at_most("dynamics.complex_family.lipschitz", p(), c.lipschitz_estimate, 1.0 + 1e-6));
    out.push(CheckReport::at_least(
        "dynamics.complex_family.nontrivial",
        p(),
        c.min_distance_from_trivial,
        (PI / samples as f64).sin() * 0.5,
    ));
    out.push(CheckReport::at_least("dynamics.complex_family.imaginary_part", p(), c.max_imaginary_part, 0.5));
    Ok(out)
}

fn dynamics_holonomy(_: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = PureState::basis_state(2, 0)?;
    let b = PureState::from_real(&[r, r])?;
    let c = PureState::new(&[C64::new(r, 0.0), C64::new(0.0, r)])?;
    let phase = dynamics::bargmann_holonomy(&[a.clone(), b.clone(), c.clone(), a.clone()])?;
    out.push(within("dynamics.holonomy.triangle", params! {"N" => 2usize}, phase, FRAC_PI_4, TOL_ALG));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let path: Vec<_> = (0..4).map(|_| state::haar_random_state(3, rng)).collect::<Result<_>>()?;
        let mut closed = path.clone();
        closed.push(path[0].clone());
        let base = dynamics::bargmann_holonomy(&closed)?;
        let raw: Vec<_> = closed
            .iter()
            .enumerate()
            .map(|(i, p)| p.coeffs() * C64::from_polar(1.0, if i == closed.len() - 1 { 0.0 } else { 0.7 * i as f64 }))
            .collect();
        let diff = (dynamics::bargmann_phase(&raw)? - base).rem_euclid(TAU);
        worst = worst.max(diff.min(TAU - diff));
    }
    out.push(CheckReport::at_most("dynamics.holonomy.gauge_invariance", params! {"N" => 3usize}, worst, TOL_ALG));
    Ok(out)
}

// ---------------------------------------------------------------- mub

const MUB: [Task; 1] = [task("mub.families", mub_families)];

fn mub_families(s: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    for n in s.dims(&[2, 3, 5, 7, 11, 13]) {
        let fam = mub::mub_family(n)?;
        let p = || params! {"N" => n};
        out.push(within("mub.count", p(), fam.len() as f64, (n + 1) as f64, 0.0));
        out.push(CheckReport::at_most("mub.unbiasedness", p(), mub::verify_unbiased(&fam), TOL_ALG));
    }
    Ok(out)
}

// ---------------------------------------------------------------- born

const BORN: [Task; 5] = [
    task("born.residual", born_residual),
    task("born.alpha_scan", born_alpha_scan),
    task("born.ode", born_ode),
    task("born.expansion", born_expansion),
    task("born.dynamics", born_dynamics),
];

pub const BORN_SELECTED: f64 = 1e-10;
pub const BORN_REJECTED: f64 = 1e-3;

fn born_residual(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(200);
    let mut alphas = vec![1.0, 2.0, 3.0, 4.0];
    if let Some(a) = s.alpha {
        if !alphas.contains(&a) {
            alphas.push(a);
        }
    }
    for n in s.dims(&[3]) {
        for &alpha in &alphas {
            let res = geometry::born_exponent_residual(alpha, n, samples, &mut rng.split(n as u64))?;
            let p = params! {"N" => n, "alpha" => alpha, "samples" => samples};
            out.push(if alpha == 2.0 {
                CheckReport::at_most("born.residual.selected", p, res, BORN_SELECTED)
            } else {
                CheckReport::at_least("born.residual.rejected", p, res, BORN_REJECTED)
            });
        }
    }
    Ok(out)
}

fn born_alpha_scan(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(200);
    for n in s.dims(&[3, 4, 5]) {
        let scan = geometry::alpha_scan(&geometry::ALPHA_GRID, n, samples, &rng.split(n as u64))?;
        let best = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map_or(f64::NAN, |b| b.0);
        out.push(within("born.alpha_scan.argmin", params! {"N" => n, "samples" => samples}, best, 2.0, 0.0));
        out.artifact(&format!("born.alpha_scan.N{n}"), &scan);
    }
    Ok(out)
}

fn born_ode(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let chk = geometry::ode_uniqueness_check(10_000, 1e-6)?;
    out.push(CheckReport::at_most(
        "born.ode.max_deviation",
        params! {"grid" => chk.grid_points, "epsilon" => chk.epsilon},
        chk.max_deviation,
        1e-6,
    ));
    out.push(within("born.n2_gap.alpha2", params! {"alpha" => 2.0}, geometry::n2_normalization_gap(2.0)?, 0.0, 0.0));
    out.push(within(
        "born.n2_gap.alpha1",
        params! {"alpha" => 1.0},
        geometry::n2_normalization_gap(1.0)?,
        SQRT_2 - 1.0,
        TOL_ALG,
    ));
    out.push(within(
        "born.exponent_mismatch",
        params! {"alpha" => 2.0},
        geometry::power_law_exponent_mismatch(2.0),
        0.0,
        0.0,
    ));
    Ok(out)
}

fn born_expansion(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let pairs = s.samples(100);
    for n in s.dims(&[2, 3, 5]) {
        let c = geometry::fs_expansion_check(n, pairs, &mut rng.split(n as u64))?;
        for (i, h) in geometry::EXPANSION_STEPS.iter().enumerate() {
            out.push(CheckReport::at_most(
                "born.expansion.cubic_coefficient",
                params! {"N" => n, "h" => *h, "pairs" => pairs},
                c.max_coefficient[i],
                geometry::CUBIC_BOUND,
            ));
        }
        out.push(CheckReport::at_most(
            "born.expansion.coefficient_growth",
            params! {"N" => n, "pairs" => pairs},
            c.max_growth,
            1e-3,
        ));
    }
    Ok(out)
}

fn born_dynamics(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let trials = s.samples(50).min(500);
    for n in s.dims(&[3]) {
        let mut rng = rng.split(n as u64);
        let mut selected: f64 = 0.0;
        let mut distorted = 0usize;
        for _ in 0..trials {
            selected = selected.max(geometry::dynamics_distortion(2.0, n, 64, &mut rng)?);
            if geometry::dynamics_distortion(3.0, n, 64, &mut rng)? > 1e-4 {
                distorted += 1;
            }
        }
        out.push(CheckReport::at_most(
            "born.dynamics.alpha2_distortion",
            params! {"N" => n, "trials" => trials},
            selected,
            1e-9,
        ));
        out.push(CheckReport::at_least(
            "born.dynamics.alpha3_distorted_fraction",
            params! {"N" => n, "trials" => trials},
            distorted as f64 / trials as f64,
            0.9,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- capacity

const CAPACITY: [Task; 3] = [
    task("capacity.table", capacity_table),
    task("capacity.deficits", capacity_deficits),
    task("capacity.enumeration", capacity_enumeration),
];

pub const TABLE_DIMENSIONS: [u64; 4] = [2, 4, 8, 16];
/// Published rows: (N, available, Kolmogorov M=2, combinatorial M=3).
const PUBLISHED_TABLE: [(u64, f64, u64, f64); 4] =
    [(2, 1.0, 1, 2.0), (4, 2.0, 3, 4.0), (8, 3.0, 7, 6.0), (16, 4.0, 15, 8.0)];

fn capacity_table(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let rows = capacity::deficit_table(&TABLE_DIMENSIONS)?;
    for (row, &(n, avail, kolm, comb)) in rows.iter().zip(PUBLISHED_TABLE.iter()) {
        let p = || params! {"N" => n};
        out.push(within("capacity.table.available", p(), row.available, avail, 0.0));
        out.push(within("capacity.table.kolm_M2", p(), row.kolm_m2 as f64, kolm as f64, 0.0));
        out.push(within("capacity.table.comb_M3", p(), row.comb_m3, comb, TOL_ALG));
        out.push(within(
            "capacity.table.feasible",
            p(),
            f64::from(u8::from(row.feasible)),
            f64::from(u8::from(n == 2)),
            0.0,
        ));
    }
    out.artifact("capacity.table", &rows);
    Ok(out)
}

fn capacity_deficits(s: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let budget = capacity::bit_budget(3, 3)?;
    out.push(within("capacity.qutrit.required_bits", params! {"N" => 3u64, "M" => 3u64}, budget.combinatorial_bits, 2.0 * 3f64.log2(), TOL_ALG));
    let m = s.m.unwrap_or(3);
    for n in s.dims(&[3, 4, 5, 7]) {
        let n = n as u64;
        for bound in [Bound::Combinatorial, Bound::Kolmogorov] {
            let f = capacity::determinism_infeasible(n, m, bound)?;
            let tag = match bound {
                Bound::Combinatorial => "combinatorial",
                Bound::Kolmogorov => "kolmogorov",
            };
            out.push(CheckReport::at_least(
                "capacity.deficit.margin",
                params! {"N" => n, "M" => m, "bound" => tag},
                f.margin,
                0.0,
            ));
        }
        let projectors = capacity::mub_projector_count(n)?;
        let f = capacity::projector_bits(n, projectors)?;
        out.push(CheckReport::at_least("capacity.projector.margin", params! {"N" => n}, f.margin, 0.0));
    }
    Ok(out)
}

fn capacity_enumeration(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    for (n, m) in [(2u64, 2u64), (2, 5), (3, 3), (4, 4), (5, 3)] {
        let formula = capacity::assignment_count(n, m)?;
        let walked = capacity::enumerate_assignments(n, m)?;
        out.push(within(
            "capacity.enumeration.count",
            params! {"N" => n, "M" => m},
            walked as f64,
            formula as f64,
            0.0,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- compose

const COMPOSE: [Task; 7] = [
    task("compose.law", compose_law),
    task("compose.tomography", compose_tomography),
    task("compose.chsh", compose_chsh),
    task("compose.entropic", compose_entropic),
    task("compose.measurement", compose_measurement),
    task("compose.no_cloning", compose_no_cloning),
    task("compose.dilution", compose_dilution),
];

fn compose_law(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let rep = composition::composition_law_tests(s.samples(1000).max(100), rng)?;
    let mut out = TaskOutput { reports: rep.to_reports(), ..Default::default() };
    out.artifact("compose.law", &rep);
    Ok(out)
}

fn compose_tomography(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    for (na, nb, field) in [
        (2, 2, Field::Complex),
        (2, 3, Field::Complex),
        (3, 3, Field::Complex),
        (2, 2, Field::Real),
    ] {
        let r = composition::local_tomography_rank(na, nb, field)?;
        let tag = match field {
            Field::Real => "real",
            Field::Complex => "complex",
        };
        let p = || params! {"N_A" => na, "N_B" => nb, "field" => tag, "full" => r.full_dimension};
        match field {
            Field::Complex => out.push(within(
                "compose.tomography.complex_rank",
                p(),
                r.rank as f64,
                r.full_dimension as f64,
                0.0,
            )),
            Field::Real => {
                let expected = (na * (na + 1) / 2) * (nb * (nb + 1) / 2);
                out.push(within("compose.tomography.real_rank", p(), r.rank as f64, expected as f64, 0.0));
                out.push(CheckReport::at_least(
                    "compose.tomography.real_deficit",
                    p(),
                    (r.full_dimension - r.rank) as f64,
                    1.0,
                ));
            }
        }
    }
    Ok(out)
}

pub const TSIRELSON: f64 = 2.0 * SQRT_2;

fn compose_chsh(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let bell = composition::bell_state();
    let canonical = composition::chsh_value(&bell, [0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8])?;
    out.push(within("compose.chsh.bell", params! {}, canonical, TSIRELSON, 1e-10));

    let samples = s.samples(1000);
    let mut sweep: f64 = 0.0;
    for _ in 0..samples {
        let psi = composition::CompositeState::new((2, 2), state::haar_random_state(4, rng)?)?;
        let angles = [(); 4].map(|_| rng.uniform_range(0.0, PI));
        sweep = sweep.max(composition::chsh_value(&psi, angles)?.abs());
    }
    out.push(CheckReport::at_most("compose.chsh.random_sweep", params! {"samples" => samples}, sweep, TSIRELSON + 1e-9));

    let grid: Vec<f64> = (0..8).map(|k| k as f64 * FRAC_PI_8).collect();
    let mut product: f64 = 0.0;
    let products = 16usize;
    for _ in 0..products {
        let x = state::haar_random_state(2, rng)?;
        let y = state::haar_random_state(2, rng)?;
        let psi = composition::tensor_state(&x, &y)?;
        for &a in &grid {
            for &a2 in &grid {
                for &b in &grid {
                    for &b2 in &grid {
                        product = product.max(composition::chsh_value(&psi, [a, a2, b, b2])?.abs());
                    }
                }
            }
        }
    }
    out.push(CheckReport::at_most(
        "compose.chsh.product_states",
        params! {"states" => products, "grid" => grid.len()},
        product,
        2.0 + 1e-9,
    ));
    out.push(within("compose.chsh.deterministic_max", params! {}, composition::deterministic_chsh_max(), 2.0, 0.0));
    Ok(out)
}

fn compose_entropic(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(1000);
    for n in s.dims(&[2, 3, 5]) {
        let fam = mub::mub_family(n)?;
        let bound = (n as f64).log2();
        let mut low = f64::INFINITY;
        for _ in 0..samples {
            let psi = state::haar_random_state(n, rng)?;
            for i in 0..fam.len() {
                for j in i + 1..fam.len() {
                    let e = composition::entropic_uncertainty_check(&psi, fam.basis(i), fam.basis(j))?;
                    low = low.min(e.sum);
                }
            }
        }
        let mut tight: f64 = 0.0;
        for i in 0..fam.len() {
            for j in 0..fam.len() {
                if i == j {
                    continue;
                }
                for v in fam.basis(i).vectors() {
                    let e = composition::entropic_uncertainty_check(v, fam.basis(i), fam.basis(j))?;
                    tight = tight.max((e.sum - bound).abs());
                }
            }
        }
        out.push(CheckReport::new(
            "compose.entropic.min_sum",
            params! {"N" => n, "samples" => samples},
            low,
            bound,
            Comparator::AtLeast,
            1e-9,
        ));
        out.push(CheckReport::at_most("compose.entropic.basis_states_tight", params! {"N" => n}, tight, TOL_ALG));
    }
    Ok(out)
}

fn compose_measurement(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let samples = s.samples(100);
    for n in s.dims(&[2, 3, 5]) {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let psi = state::haar_random_state(n, rng)?;
            let m = composition::measurement_interaction(&psi, n)?;
            for (a, p) in m.branch_affinities.iter().zip(psi.probabilities()) {
                worst = worst.max((a - p).abs());
            }
        }
        let model = composition::MeasurementModel::new(n)?;
        out.push(CheckReport::at_most(
            "compose.measurement.branch_affinities",
            params! {"N" => n, "samples" => samples},
            worst,
            TOL_ALG,
        ));
        out.push(CheckReport::at_most(
            "compose.measurement.calibration",
            params! {"N" => n},
            model.calibration_defect()?,
            TOL_ALG,
        ));
    }
    Ok(out)
}

fn compose_no_cloning(_: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    out.push(within("compose.no_cloning.gap", params! {"s" => 0.0}, composition::no_cloning_gap(C64::new(0.0, 0.0))?, 0.0, 0.0));
    out.push(within("compose.no_cloning.gap", params! {"s" => 1.0}, composition::no_cloning_gap(C64::new(1.0, 0.0))?, 0.0, 0.0));
    out.push(within("compose.no_cloning.gap", params! {"s" => 0.5}, composition::no_cloning_gap(C64::new(0.5, 0.0))?, 0.25, TOL_ALG));
    // Overlaps of random state pairs never survive cloning unless trivial.
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let x = state::haar_random_state(3, rng)?;
        let y = state::haar_random_state(3, rng)?;
        let s = x.inner(&y)?;
        let gap = composition::no_cloning_gap(s)?;
        let target = s.norm() * (1.0 - s.norm());
        worst = worst.max(target - gap);
    }
    out.push(CheckReport::at_most("compose.no_cloning.random_pairs", params! {"N" => 3usize}, worst, TOL_ALG));
    Ok(out)
}

fn compose_dilution(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let d = composition::capacity_dilution(2, 5)?;
    out.push(within("compose.dilution.n_eff", params! {"N_S" => 2usize, "N_E" => 5usize}, d.n_eff as f64, 10.0, 0.0));
    out.push(within(
        "compose.dilution.phase_degrees",
        params! {"N_S" => 2usize, "N_E" => 5usize},
        d.delta_phi_degrees,
        36.0,
        TOL_ALG,
    ));
    let small = composition::capacity_dilution(2, 1)?;
    out.push(within(
        "compose.dilution.trivial_below_three",
        params! {"N_S" => 2usize, "N_E" => 1usize},
        f64::from(u8::from(small.dynamics_nontrivial)),
        0.0,
        0.0,
    ));
    Ok(out)
}

// ---------------------------------------------------------------- sampling

const SAMPLING: [Task; 7] = [
    task("sampling.granularity", sampling_granularity),
    task("sampling.indistinguishability", sampling_indistinguishability),
    task("sampling.entropy_floor", sampling_entropy_floor),
    task("sampling.zeno", sampling_zeno),
    task("sampling.reconstruction", sampling_reconstruction),
    task("sampling.audit", sampling_audit),
    task("sampling.n2_scan", sampling_n2_scan),
];

fn sampling_granularity(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let mut worst: f64 = 0.0;
    for n in 1..=64 {
        let g = sampling::granularity(n, 1.0)?;
        worst = worst.max((g.delta_theta * n as f64 - TAU).abs());
    }
    out.push(CheckReport::at_most("sampling.granularity.closure", params! {}, worst, TOL_ALG));
    let ten = sampling::granularity(10, 1.0)?;
    out.push(within("sampling.granularity.degrees", params! {"N" => 10usize}, ten.delta_theta.to_degrees(), 36.0, TOL_ALG));
    Ok(out)
}

fn sampling_indistinguishability(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let trials = s.samples(1000);
    for n in s.dims(&[3, 4, 8]) {
        let psi = state::haar_random_state(n, rng)?;
        let eps = 1.0 / (2.0 * n as f64);
        let rec = sampling::indistinguishability_bound_check(&psi, eps, trials, rng)?;
        let p = || params! {"N" => n, "epsilon" => eps, "trials" => trials};
        out.push(CheckReport::at_most("sampling.indistinguishability.max_kernel", p(), rec.max_kernel, rec.bound));
        out.push(CheckReport::at_most(
            "sampling.indistinguishability.violations",
            p(),
            (rec.kernel_violations + rec.overlap_violations) as f64,
            0.0,
        ));
    }
    Ok(out)
}

fn sampling_entropy_floor(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for n in 2..=64 {
        let e = sampling::entropy_floor_check(n)?;
        worst = worst.max(e.ratio.max(1.0 / e.ratio));
        rows.push(e);
    }
    out.push(CheckReport::at_most("sampling.entropy_floor.factor", params! {"N_max" => 64usize}, worst, 4.0));
    let four = sampling::entropy_floor_check(4)?;
    out.push(within("sampling.entropy_floor.N4_floor", params! {"N" => 4usize}, four.floor, 0.5, 0.0));
    out.artifact("sampling.entropy_floor", &rows);
    Ok(out)
}

fn sampling_zeno(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let fit = sampling::zeno_floor_sim(1.0, 1.0)?;
    out.push(within("sampling.zeno.exponent", params! {"delta_e" => 1.0, "T" => 1.0}, fit.exponent, -2.0, 0.1));
    out.push(within(
        "sampling.zeno.stationary",
        params! {"N" => 16usize},
        sampling::zeno_flip_probability(16, 0.0, 1.0)?,
        0.0,
        0.0,
    ));
    out.artifact("sampling.zeno", &fit);
    Ok(out)
}

pub const RECONSTRUCTION_SHARE: f64 = 0.99;

fn sampling_reconstruction(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let trials = s.samples(1000);
    for n in s.dims(&[3]) {
        let sweep = sampling::reconstruction_sweep(n, trials, &rng.split(n as u64))?;
        let p = || params! {"N" => n, "trials" => trials};
        out.push(CheckReport::at_least(
            "sampling.reconstruction.high_fidelity_share",
            p(),
            sweep.high_fidelity_fraction(),
            RECONSTRUCTION_SHARE,
        ));
        out.push(CheckReport::at_least(
            "sampling.reconstruction.unflagged_fidelity",
            p(),
            sweep.min_unflagged_fidelity,
            sampling::SAME_STATE_FIDELITY,
        ));
        out.push(CheckReport::at_most("sampling.reconstruction.infeasible", p(), sweep.infeasible as f64, 0.0));
        out.artifact(&format!("sampling.reconstruction.N{n}"), &sweep);
    }
    Ok(out)
}

fn sampling_audit(s: &Settings, rng: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let trials = s.samples(1000);
    for n in s.dims(&[2, 3, 5]) {
        let summary = sampling::two_basis_sufficiency_audit(n, trials, &rng.split(n as u64))?;
        out.push(CheckReport::at_most(
            "sampling.audit.random_counterexamples",
            params! {"N" => n, "trials" => trials},
            summary.random_counterexamples as f64,
            0.0,
        ));
        out.artifact(&format!("sampling.audit.N{n}"), &summary);
    }
    Ok(out)
}

fn sampling_n2_scan(_: &Settings, _: &mut RandomSource) -> Result<TaskOutput> {
    let mut out = TaskOutput::default();
    let scan = sampling::n2_ambiguity_scan(1e-3)?;
    out.push(within(
        "sampling.n2_scan.non_mirror_pairs",
        params! {"step" => scan.step},
        (scan.ambiguous_pairs - scan.mirror_pairs) as f64,
        0.0,
        0.0,
    ));
    out.artifact("sampling.n2_scan", &scan);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::CONCRETE {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(CliError::UnknownSuite(_))));
        assert_eq!(Suite::All.expand().len(), 7);
    }

    #[test]
    fn task_names_are_unique() {
        let mut names: Vec<_> = Suite::All.tasks().iter().map(|t| t.name).collect();
        let len = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), len);
    }

    #[test]
    fn permutations_are_exhaustive() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
