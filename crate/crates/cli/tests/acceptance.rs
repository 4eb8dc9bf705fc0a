//! Acceptance criteria. Each test prints one PASS/FAIL line to stderr
//! (uncaptured) and then asserts.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};
use std::io::Write;
use std::path::Path;
use std::process::Command;

use caplab_core::composition::{self, CompositeState, Field};
use caplab_core::{dynamics, geometry, mub, sampling, state, Basis, PureState, RandomSource, C64};

fn verdict(id: u32, title: &str, ok: bool, detail: impl AsRef<str>) {
    let line = format!(
        "{} criterion {id:>2} {title}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(ok, "{line}");
}

fn caplab(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_caplab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

// Oracles over raw coefficient vectors.

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn raw(psi: &PureState) -> Vec<C64> {
    psi.coeffs().iter().copied().collect()
}

fn oracle_kernel(x: &[C64], y: &[C64]) -> f64 {
    let nx: f64 = dot(x, x).re;
    let ny: f64 = dot(y, y).re;
    1.0 - dot(x, y).norm_sqr() / (nx * ny)
}

fn oracle_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn oracle_probabilities(psi: &PureState, basis: &Basis) -> Vec<f64> {
    basis.vectors().iter().map(|b| dot(&raw(b), &raw(psi)).norm_sqr()).collect()
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

#[test]
fn criterion_01_bit_budget_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = caplab(&["capacity", "table", "--out", "table.csv"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("table.csv")).unwrap_or_default();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("N,available,kolm_M2,comb_M3,feasible");
    let published = [(2u64, 1.0, 1u64, 2.0, true), (4, 2.0, 3, 4.0, false), (8, 3.0, 7, 6.0, false), (16, 4.0, 15, 8.0, false)];
    let mut rows_ok = true;
    let mut rows = 0;
    for (line, &(n, avail, kolm, comb, feasible)) in lines.zip(published.iter()) {
        let f: Vec<&str> = line.split(',').collect();
        rows += 1;
        let parsed = (
            f[0].parse::<u64>().unwrap(),
            f[1].parse::<f64>().unwrap(),
            f[2].parse::<u64>().unwrap(),
            f[3].parse::<f64>().unwrap(),
            f[4].parse::<bool>().unwrap(),
        );
        // exact against the published table and against (M-1)(N-1), (M-1) log2 N
        rows_ok &= parsed == (n, avail, kolm, comb, feasible);
        rows_ok &= parsed.2 == n - 1 && parsed.3 == 2.0 * (n as f64).log2();
    }
    let ok = out.status.success() && header_ok && rows == 4 && rows_ok;
    verdict(1, "bit-budget table", ok, format!("{rows} rows, header {header_ok}, values {rows_ok}, only N=2 feasible"));
}

#[test]
fn criterion_02_qutrit_walkthrough() {
    let dir = tempfile::tempdir().unwrap();
    let out = caplab(&["walkthrough", "--out", "walk.json"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let reports: Vec<caplab_core::CheckReport> =
        serde_json::from_slice(&std::fs::read(dir.path().join("walk.json")).unwrap_or_default()).unwrap_or_default();

    let required = 2.0 * 3f64.log2();
    let available = 3f64.log2();
    let bits_ok = (required - 3.1699).abs() < 1e-4 && (available - 1.5850).abs() < 1e-4 && required > available;
    let count = mub::mub_family(3).unwrap().len();
    let equal = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
    let p = state::affinities(&equal, &Basis::computational(3).unwrap()).unwrap();
    let aff_dev = max_abs(p.iter().map(|x| (x - 1.0 / 3.0).abs()));
    let printed = stdout.contains("3.1699 bits > 1.5850") && stdout.contains("unbiased bases: 4");
    let ok = out.status.success()
        && bits_ok
        && count == 4
        && aff_dev <= 1e-12
        && printed
        && !reports.is_empty()
        && reports.iter().all(|r| r.pass && r.is_consistent());
    verdict(
        2,
        "qutrit walkthrough",
        ok,
        format!("{required:.4} vs {available:.4} bits, {count} MUBs, affinity deviation {aff_dev:.1e}"),
    );
}

#[test]
fn criterion_03_mub_validity() {
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    for n in [2usize, 3, 5, 7, 11, 13] {
        let fam = mub::mub_family(n).unwrap();
        counts_ok &= fam.len() == n + 1;
        let vecs: Vec<Vec<Vec<C64>>> = fam.bases().iter().map(|b| b.vectors().iter().map(raw).collect()).collect();
        for (i, b) in vecs.iter().enumerate() {
            for (k, u) in b.iter().enumerate() {
                for (l, v) in b.iter().enumerate() {
                    let want = if k == l { 1.0 } else { 0.0 };
                    worst = worst.max((dot(u, v).norm_sqr() - want).abs());
                }
            }
            for b2 in &vecs[i + 1..] {
                for u in b {
                    for v in b2 {
                        worst = worst.max((dot(u, v).norm_sqr() - 1.0 / n as f64).abs());
                    }
                }
            }
        }
    }
    let ok = counts_ok && worst < 1e-12;
    verdict(3, "MUB validity", ok, format!("N+1 bases for N in {{2,3,5,7,11,13}}: {counts_ok}, worst deviation {worst:.2e}"));
}

/// Finite-difference oracle for the Fisher-Rao / Fubini-Study ratio spread.
fn oracle_born_cv(alpha: f64, n: usize, samples: usize, rng: &mut RandomSource) -> f64 {
    let h = 1e-6;
    let law = |x: &[f64]| {
        let w: Vec<f64> = x.iter().map(|v| v.powf(alpha / 2.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect::<Vec<_>>()
    };
    let mut ratios = Vec::new();
    while ratios.len() < samples {
        let mut x: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        let mut dx: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = dx.iter().sum::<f64>() / n as f64;
        dx.iter_mut().for_each(|v| *v -= mean);
        let plus: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a - h * b).collect();
        let (pp, pm, p0) = (law(&plus), law(&minus), law(&x));
        let g_fr: f64 = (0..n).map(|k| ((pp[k] - pm[k]) / (2.0 * h)).powi(2) / p0[k]).sum();
        let g_fs: f64 = (0..n).map(|k| dx[k] * dx[k] / (4.0 * x[k])).sum();
        ratios.push(g_fr / g_fs);
    }
    let m = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / ratios.len() as f64;
    var.sqrt() / m
}

#[test]
fn criterion_04_born_exponent_selection() {
    let res = |a: f64| geometry::born_exponent_residual(a, 3, 200, &mut RandomSource::new(7)).unwrap();
    let at_two = res(2.0);
    let others: Vec<f64> = [1.0, 3.0, 4.0].iter().map(|&a| res(a)).collect();
    let mut argmins = Vec::new();
    for n in [3usize, 4, 5] {
        let scan = geometry::alpha_scan(&geometry::ALPHA_GRID, n, 200, &RandomSource::new(n as u64)).unwrap();
        argmins.push(scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0);
    }
    let oracle_two = oracle_born_cv(2.0, 3, 200, &mut RandomSource::new(1));
    let oracle_three = oracle_born_cv(3.0, 3, 200, &mut RandomSource::new(1));
    let ok = at_two < 1e-10
        && others.iter().all(|&r| r > 1e-3)
        && argmins.iter().all(|&a| a == 2.0)
        && oracle_two < 1e-6
        && oracle_three > 1e-3;
    verdict(
        4,
        "Born exponent selection",
        ok,
        format!(
            "residual(2)={at_two:.1e}, residual(1,3,4)={:.2e}/{:.2e}/{:.2e}, argmin {argmins:?}, finite-difference oracle {oracle_two:.1e}/{oracle_three:.2e}",
            others[0], others[1], others[2]
        ),
    );
}

#[test]
fn criterion_05_ode_uniqueness() {
    let chk = geometry::ode_uniqueness_check(10_000, 1e-6).unwrap();
    let gap2 = geometry::n2_normalization_gap(2.0).unwrap();
    let gap1 = geometry::n2_normalization_gap(1.0).unwrap();
    let ok = chk.grid_points >= 10_000 && chk.max_deviation < 1e-6 && gap2 == 0.0 && (gap1 - (SQRT_2 - 1.0)).abs() < 1e-12;
    verdict(
        5,
        "ODE uniqueness",
        ok,
        format!("max |f(x)-x| = {:.2e} on {} points, gap(2) = {gap2}, gap(1) = {gap1:.15}", chk.max_deviation, chk.grid_points),
    );
}

#[test]
fn criterion_06_metric_expansion() {
    let mut worst = [0.0f64; 2];
    let mut growth = f64::NEG_INFINITY;
    let mut closed_form: f64 = 0.0;
    let mut lib_ok = true;
    for n in [2usize, 3, 5] {
        let mut rng = RandomSource::new(60 + n as u64);
        for _ in 0..100 {
            let psi = raw(&state::haar_random_state(n, &mut rng).unwrap());
            // tangent to the unit sphere: Re<ψ|v> = 0
            let v: Vec<C64> = (0..n).map(|_| rng.complex_normal()).collect();
            let along = dot(&psi, &v).re;
            let v: Vec<C64> = v.iter().zip(&psi).map(|(a, p)| a - p * along).collect();
            let vn = dot(&v, &v).re.sqrt();
            let v: Vec<C64> = v.iter().map(|z| z / vn).collect();
            let g = dot(&v, &v).re - dot(&psi, &v).norm_sqr();
            let c = |h: f64| {
                let moved: Vec<C64> = psi.iter().zip(&v).map(|(a, b)| a + b * h).collect();
                (oracle_kernel(&psi, &moved) - h * h * g).abs() / h.powi(3)
            };
            let closed = |h: f64| {
                let moved: Vec<C64> = psi.iter().zip(&v).map(|(a, b)| a + b * h).collect();
                (oracle_kernel(&psi, &moved) - h * h * g / (1.0 + h * h)).abs()
            };
            closed_form = closed_form.max(closed(1e-3)).max(closed(1e-4));
            let (c3, c4) = (c(1e-3), c(1e-4));
            worst[0] = worst[0].max(c3);
            worst[1] = worst[1].max(c4);
            growth = growth.max(c4 - c3);
        }
        let lib = geometry::fs_expansion_check(n, 100, &mut RandomSource::new(n as u64)).unwrap();
        lib_ok &= lib.max_coefficient.iter().all(|&x| x <= geometry::CUBIC_BOUND) && lib.max_growth <= 1e-3;
    }
    let ok = worst.iter().all(|&x| x <= geometry::CUBIC_BOUND) && growth <= 1e-3 && closed_form < 1e-15 && lib_ok;
    verdict(
        6,
        "metric expansion",
        ok,
        format!("max |K-h²g|/h³ = {:.2e} (h=1e-3), {:.2e} (h=1e-4), growth {growth:.1e}, K vs h²g/(1+h²) {closed_form:.1e}", worst[0], worst[1]),
    );
}

fn oracle_cycle_count(sigma: &[usize]) -> usize {
    let mut seen = vec![false; sigma.len()];
    let mut count = 0;
    for s in 0..sigma.len() {
        if !seen[s] {
            count += 1;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = sigma[i];
            }
        }
    }
    count
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn criterion_07_dynamics() {
    let mut power_ok = true;
    let mut group: f64 = 0.0;
    let mut period: f64 = 0.0;
    let mut orbit: f64 = 0.0;
    let mut unbiased: f64 = 0.0;
    let mut rng = RandomSource::new(70);
    for n in 2..=12usize {
        let g = dynamics::cyclic_generator(n).unwrap();
        // P e_k = e_{k+1 mod N}
        let shift = |k: u32| -> Vec<Vec<f64>> {
            (0..n).map(|j| (0..n).map(|c| if j == (c + k as usize) % n { 1.0 } else { 0.0 }).collect()).collect()
        };
        for k in 1..=n as u32 {
            let m = g.unitary().pow(k);
            let want = shift(k);
            let matches = (0..n).all(|j| (0..n).all(|c| (m.matrix()[(j, c)] - C64::new(want[j][c], 0.0)).norm() < 1e-12));
            let is_identity = (0..n).all(|j| want[j][j] == 1.0);
            power_ok &= matches && (is_identity == (k as usize == n));
        }
        let fam = dynamics::interpolate_evolution(&g, 1.0).unwrap();
        for _ in 0..10 {
            let (a, b) = (rng.uniform_range(-2.0, 2.0), rng.uniform_range(-2.0, 2.0));
            let ab = fam.evaluate(a).compose(&fam.evaluate(b)).unwrap();
            let direct = fam.evaluate(a + b);
            group = group.max(max_abs(ab.matrix().iter().zip(direct.matrix().iter()).map(|(x, y)| (x - y).norm())));
            let x = state::haar_random_state(n, &mut rng).unwrap();
            let y = state::haar_random_state(n, &mut rng).unwrap();
            let u = fam.evaluate(a);
            let ux = u.matrix() * x.coeffs();
            let uy = u.matrix() * y.coeffs();
            let moved = oracle_kernel(ux.as_slice(), uy.as_slice());
            orbit = orbit.max((moved - oracle_kernel(&raw(&x), &raw(&y))).abs());
        }
        let ut = fam.evaluate(1.0);
        period = period.max(max_abs((0..n).flat_map(|j| (0..n).map(move |c| (j, c))).map(|(j, c)| {
            (ut.matrix()[(j, c)] - C64::new(if j == c { 1.0 } else { 0.0 }, 0.0)).norm()
        })));
        let f = dynamics::fourier_eigenbasis(n).unwrap();
        for k in 0..n {
            for v in f.vectors() {
                let e = PureState::basis_state(n, k).unwrap();
                unbiased = unbiased.max((oracle_kernel(&raw(&e), &raw(v)) - (1.0 - 1.0 / n as f64)).abs());
            }
        }
    }
    let mut dichotomy_ok = true;
    let mut checked = 0;
    for n in 1..=5usize {
        for sigma in all_permutations(n) {
            let prof = dynamics::permutation_eigen_analysis(&sigma).unwrap();
            dichotomy_ok &= prof.uniform == (oracle_cycle_count(&sigma) == 1);
            checked += 1;
        }
    }
    let ok = power_ok && group < 1e-10 && period < 1e-10 && orbit < 1e-10 && unbiased < 1e-12 && dichotomy_ok;
    verdict(
        7,
        "dynamics",
        ok,
        format!(
            "powers {power_ok}, group law {group:.1e}, U(T)-I {period:.1e}, orbit kernel {orbit:.1e}, K(b,f) {unbiased:.1e}, dichotomy over {checked} permutations {dichotomy_ok}"
        ),
    );
}

#[test]
fn criterion_08_n2_obstruction() {
    let scan = dynamics::n2_obstruction_scan(400).unwrap();
    let want = [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)];
    let located = scan.solutions.len() == 4
        && scan
            .solutions
            .iter()
            .zip(want.iter())
            .all(|(s, w)| (s.0 - w.0).abs() + (s.1 - w.1).abs() < 2.0 / 400.0);
    let fam = dynamics::complex_family_check(64, &mut RandomSource::new(8)).unwrap();
    // U(π/2) = iS leaves the reals and is neither I nor -I.
    let quarter = dynamics::swap_family(PI / 2.0);
    let is_is = (quarter[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-15 && quarter[(0, 0)].norm() < 1e-15;
    let ok = located
        && fam.max_unitarity_defect < 1e-12
        && fam.max_kernel_change < 1e-12
        && fam.min_distance_from_trivial > 0.0
        && fam.max_imaginary_part > 0.5
        && is_is;
    verdict(
        8,
        "N=2 obstruction",
        ok,
        format!(
            "{} real solutions {:?}, complex family distance from ±I {:.3}, imaginary part {:.3}",
            scan.solutions.len(),
            scan.solutions,
            fam.min_distance_from_trivial,
            fam.max_imaginary_part
        ),
    );
}

fn oracle_kron(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

#[test]
fn criterion_09_composition() {
    let mut rng = RandomSource::new(90);
    let f = |a: f64, b: f64| composition::kernel_compose(a, b).unwrap();
    let (mut boundary, mut symmetry, mut assoc): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let (x, y, z) = (rng.uniform(), rng.uniform(), rng.uniform());
        boundary = boundary.max((f(0.0, y) - y).abs()).max((f(x, 1.0) - 1.0).abs());
        symmetry = symmetry.max((f(x, y) - f(y, x)).abs());
        assoc = assoc.max((f(f(x, y), z) - f(x, f(y, z))).abs());
    }
    let mut factor: f64 = 0.0;
    for (na, nb) in [(2usize, 2usize), (2, 3), (3, 3), (2, 5)] {
        for _ in 0..100 {
            let [a1, a2] = [(); 2].map(|_| state::haar_random_state(na, &mut rng).unwrap());
            let [b1, b2] = [(); 2].map(|_| state::haar_random_state(nb, &mut rng).unwrap());
            let joint = oracle_kernel(&oracle_kron(&raw(&a1), &raw(&b1)), &oracle_kron(&raw(&a2), &raw(&b2)));
            let composed = f(state::kernel(&a1, &a2).unwrap(), state::kernel(&b1, &b2).unwrap());
            factor = factor.max((joint - composed).abs());
        }
    }
    let ok = boundary <= 1e-12 && symmetry <= 1e-12 && assoc <= 1e-12 && factor <= 1e-12;
    verdict(
        9,
        "composition",
        ok,
        format!("boundary {boundary:.1e}, symmetry {symmetry:.1e}, associativity {assoc:.1e}, product factorization {factor:.1e}"),
    );
}

#[test]
fn criterion_10_local_tomography() {
    let rank = |a, b, f| composition::local_tomography_rank(a, b, f).unwrap();
    let c22 = rank(2, 2, Field::Complex);
    let r22 = rank(2, 2, Field::Real);
    let c23 = rank(2, 3, Field::Complex);
    let c33 = rank(3, 3, Field::Complex);
    let ok = (c22.rank, c22.full_dimension) == (16, 16)
        && (r22.rank, r22.full_dimension) == (9, 10)
        && (c23.rank, c23.full_dimension) == (36, 36)
        && (c33.rank, c33.full_dimension) == (81, 81);
    verdict(
        10,
        "local tomography",
        ok,
        format!(
            "(2,2)C {}/{}, (2,2)R {}/{}, (2,3)C {}/{}, (3,3)C {}/{}",
            c22.rank, c22.full_dimension, r22.rank, r22.full_dimension, c23.rank, c23.full_dimension, c33.rank, c33.full_dimension
        ),
    );
}

#[test]
fn criterion_11_chsh() {
    let bell = composition::bell_state();
    let s = composition::chsh_value(&bell, [0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8]).unwrap();
    // E(a, b) = cos 2(a − b) for the Bell state in the real plane.
    let mut rng = RandomSource::new(11);
    let mut correlator_dev: f64 = 0.0;
    for _ in 0..50 {
        let (a, b) = (rng.uniform_range(0.0, PI), rng.uniform_range(0.0, PI));
        correlator_dev = correlator_dev.max((composition::correlator(&bell, a, b).unwrap() - (2.0 * (a - b)).cos()).abs());
    }
    let mut sweep: f64 = 0.0;
    for _ in 0..1000 {
        let psi = CompositeState::new((2, 2), state::haar_random_state(4, &mut rng).unwrap()).unwrap();
        let angles = [(); 4].map(|_| rng.uniform_range(0.0, PI));
        sweep = sweep.max(composition::chsh_value(&psi, angles).unwrap().abs());
    }
    let grid: Vec<f64> = (0..8).map(|k| k as f64 * FRAC_PI_8).collect();
    let mut product: f64 = 0.0;
    for _ in 0..10 {
        let x = state::haar_random_state(2, &mut rng).unwrap();
        let y = state::haar_random_state(2, &mut rng).unwrap();
        let psi = composition::tensor_state(&x, &y).unwrap();
        for &a in &grid {
            for &a2 in &grid {
                for &b in &grid {
                    for &b2 in &grid {
                        product = product.max(composition::chsh_value(&psi, [a, a2, b, b2]).unwrap().abs());
                    }
                }
            }
        }
    }
    let tsirelson = 2.0 * SQRT_2;
    let ok = (s - tsirelson).abs() < 1e-10 && correlator_dev < 1e-12 && sweep <= tsirelson + 1e-9 && product <= 2.0 + 1e-9;
    verdict(
        11,
        "CHSH",
        ok,
        format!("Bell S = {s:.12}, random max {sweep:.6}, product-state max {product:.6}"),
    );
}

#[test]
fn criterion_12_entropic_uncertainty() {
    let mut rng = RandomSource::new(12);
    let mut margin = f64::INFINITY;
    let mut tight: f64 = 0.0;
    let mut lib_agrees: f64 = 0.0;
    for n in [2usize, 3, 5] {
        let fam = mub::mub_family(n).unwrap();
        let (b, b2) = (fam.basis(0), fam.basis(1));
        let bound = (n as f64).log2();
        for _ in 0..1000 {
            let psi = state::haar_random_state(n, &mut rng).unwrap();
            let sum = oracle_entropy(&oracle_probabilities(&psi, b)) + oracle_entropy(&oracle_probabilities(&psi, b2));
            margin = margin.min(sum - bound);
            let lib = composition::entropic_uncertainty_check(&psi, b, b2).unwrap();
            lib_agrees = lib_agrees.max((lib.sum - sum).abs());
        }
        for v in b.vectors() {
            let sum = oracle_entropy(&oracle_probabilities(v, b)) + oracle_entropy(&oracle_probabilities(v, b2));
            tight = tight.max((sum - bound).abs());
        }
    }
    let ok = margin >= -1e-9 && tight < 1e-12 && lib_agrees < 1e-12;
    verdict(
        12,
        "entropic uncertainty",
        ok,
        format!("min H(B)+H(B') - log2 N = {margin:.3e}, basis states off by {tight:.1e}"),
    );
}

#[test]
fn criterion_13_measurement() {
    let mut rng = RandomSource::new(13);
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 5] {
        for _ in 0..100 {
            let psi = state::haar_random_state(n, &mut rng).unwrap();
            let out = composition::measurement_interaction(&psi, n).unwrap();
            for (k, a) in out.branch_affinities.iter().enumerate() {
                worst = worst.max((a - psi.amplitude(k).norm_sqr()).abs());
            }
        }
    }
    let ok = worst <= 1e-12;
    verdict(13, "measurement", ok, format!("max |affinity_k - |c_k|²| = {worst:.1e} over 300 states"));
}

#[test]
fn criterion_14_sampling_floors() {
    let mut rng = RandomSource::new(14);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for n in [3usize, 4, 8] {
        let psi = state::haar_random_state(n, &mut rng).unwrap();
        let rec = sampling::indistinguishability_bound_check(&psi, 1.0 / (2.0 * n as f64), 1000, &mut rng).unwrap();
        violations += rec.kernel_violations + rec.overlap_violations;
        max_ratio = max_ratio.max(rec.max_kernel / (2.0 / n as f64));
    }
    let fit = sampling::zeno_floor_sim(1.0, 1.0).unwrap();
    // Oracle: sin²(ΔE T / 2N) for the equal two-level superposition.
    let analytic: Vec<f64> = sampling::ZENO_DIMENSIONS.iter().map(|&n| (0.5 / n as f64).sin().powi(2)).collect();
    let prob_dev = max_abs(fit.probabilities.iter().zip(&analytic).map(|(a, b)| (a - b).abs() / b));
    let mut factor: f64 = 0.0;
    for n in 2..=64usize {
        let nf = n as f64;
        let floor = nf.log2() / nf;
        let op = oracle_entropy(&[1.0 - 1.0 / nf, 1.0 / nf]);
        let lib = sampling::entropy_floor_check(n).unwrap();
        assert!((lib.operational - op).abs() < 1e-12);
        factor = factor.max((op / floor).max(floor / op));
    }
    let ok = violations == 0 && (fit.exponent + 2.0).abs() <= 0.1 && prob_dev < 1e-9 && factor <= 4.0;
    verdict(
        14,
        "sampling floors",
        ok,
        format!(
            "{violations} violations (max kernel {max_ratio:.3} of 2/N), Zeno exponent {:.4}, entropy floor factor {factor:.3}",
            fit.exponent
        ),
    );
}

#[test]
fn criterion_15_reconstruction() {
    let sweep = sampling::reconstruction_sweep(3, 1000, &RandomSource::new(15)).unwrap();
    let share = sweep.high_fidelity_fraction();
    let logged = sweep.cases.len() == sweep.flagged
        && sweep.cases.iter().all(|c| c.truth.dim() == 3 && c.p_b.len() == 3 && c.p_b2.len() == 3);
    let audit = sampling::two_basis_sufficiency_audit(3, 1000, &RandomSource::new(16)).unwrap();
    let ok = share >= 0.99 && logged;
    verdict(
        15,
        "two-basis reconstruction",
        ok,
        format!(
            "fidelity > 1-1e-8 on {:.1}% (need 99%); {} of {} flagged ambiguous, all logged {logged}; true state among candidates in {}; audit counterexamples: {} random, {} constructed",
            100.0 * share,
            sweep.flagged,
            sweep.trials,
            sweep.truth_among_candidates,
            audit.random_counterexamples,
            audit.constructed_counterexamples
        ),
    );
}

#[test]
fn criterion_16_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = caplab(&["verify", "all", "--seed", "7", "--out", "a.json"], dir.path());
    let b = caplab(&["verify", "all", "--seed", "7", "--out", "b.json"], dir.path());
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap_or_default();
    let same_reports = !read("a.json").is_empty() && read("a.json") == read("b.json");
    let same_data = !read("a.data.json").is_empty() && read("a.data.json") == read("b.data.json");
    let same_status = a.status.code() == b.status.code();
    let ok = same_reports && same_data && same_status;
    verdict(
        16,
        "determinism",
        ok,
        format!("reports identical {same_reports}, data identical {same_data}, exit {:?}", a.status.code()),
    );
}
