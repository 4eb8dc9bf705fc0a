//! The qutrit in numbers: capacity, unbiased bases, storage deficit,
//! equal-superposition affinities and the cyclic spectrum.

use caplab_core::{capacity, dynamics, mub, params, state, CheckReport, PureState, Result, TOL_ALG};

#[derive(Debug, Clone)]
pub struct Walkthrough {
    pub lines: Vec<String>,
    pub reports: Vec<CheckReport>,
}

/// Published figures, compared at four decimals.
pub const REQUIRED_BITS: f64 = 3.1699;
pub const AVAILABLE_BITS: f64 = 1.5850;
pub const FIGURE_TOL: f64 = 1e-4;

pub fn qutrit_walkthrough() -> Result<Walkthrough> {
    let n = 3usize;
    let mut lines = vec![format!("Qutrit walkthrough (N = {n})")];
    let mut reports = Vec::new();

    let family = mub::mub_family(n)?;
    let dev = mub::verify_unbiased(&family);
    lines.push(format!("unbiased bases: {} (worst deviation {dev:.1e})", family.len()));
    reports.push(CheckReport::approx("walkthrough.mub_count", params! {"N" => n}, family.len() as f64, 4.0, 0.0));

    let budget = capacity::bit_budget(n as u64, family.len() as u64 - 1)?;
    lines.push(format!(
        "storage for outcomes in {} bases: {:.4} bits > {:.4} bits available",
        budget.m, budget.combinatorial_bits, budget.available_bits
    ));
    let p = || params! {"N" => n, "M" => budget.m};
    reports.push(CheckReport::approx("walkthrough.required_bits", p(), budget.combinatorial_bits, REQUIRED_BITS, FIGURE_TOL));
    reports.push(CheckReport::approx("walkthrough.available_bits", p(), budget.available_bits, AVAILABLE_BITS, FIGURE_TOL));
    reports.push(CheckReport::at_least(
        "walkthrough.deficit",
        p(),
        budget.combinatorial_bits - budget.available_bits,
        0.0,
    ));

    let equal = PureState::from_real(&[1.0; 3])?;
    let aff = state::affinities(&equal, family.basis(0))?;
    let spread = aff.iter().map(|p| (p - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    lines.push(format!(
        "equal superposition affinities: {}",
        aff.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(", ")
    ));
    reports.push(CheckReport::at_most("walkthrough.affinities", params! {"N" => n}, spread, TOL_ALG));

    let g = dynamics::cyclic_generator(n)?;
    let eig = g.eigenvalues();
    lines.push(format!(
        "cyclic generator eigenvalues: {}",
        eig.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect::<Vec<_>>().join(", ")
    ));
    reports.push(CheckReport::at_most(
        "walkthrough.cyclic_eigenvalues",
        params! {"N" => n},
        g.roots_of_unity_defect(),
        TOL_ALG,
    ));
    reports.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    Ok(Walkthrough { lines, reports })
}
