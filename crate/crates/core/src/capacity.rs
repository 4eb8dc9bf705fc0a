//! Bit budgets for deterministic outcome assignments.
//!
//! A capacity-N system stores `log2 N` bits. Predetermined outcomes for `M`
//! mutually unbiased contexts need `(M-1) log2 N` bits (counting argument)
//! or `(M-1)(N-1)` bits (incompressibility argument).

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack for the real-valued combinatorial comparison.
pub const COMBINATORIAL_SLACK: f64 = 1e-9;

/// Largest count that [`enumerate_assignments`] will walk.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitBudget {
    pub n: u64,
    pub m: u64,
    pub available_bits: f64,
    pub combinatorial_bits: f64,
    pub kolmogorov_bits: u64,
}

pub fn bit_budget(n: u64, m: u64) -> Result<BitBudget> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameters(format!("need N >= 2 and M >= 2, got N={n}, M={m}")));
    }
    let available_bits = (n as f64).log2();
    let kolmogorov_bits = (m - 1)
        .checked_mul(n - 1)
        .ok_or_else(|| Error::Overflow(format!("(M-1)(N-1) for N={n}, M={m}")))?;
    Ok(BitBudget {
        n,
        m,
        available_bits,
        combinatorial_bits: (m - 1) as f64 * available_bits,
        kolmogorov_bits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Combinatorial,
    Kolmogorov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub required_bits: f64,
    pub available_bits: f64,
    /// `required − available`.
    pub margin: f64,
    pub infeasible: bool,
}

/// `2^bits > n`, exactly.
fn exceeds_capacity(bits: u64, n: u64) -> bool {
    bits >= 64 || (1u128 << bits) > u128::from(n)
}

/// Whether deterministic storage for `(N, M)` under `bound` exceeds `log2 N`.
/// The Kolmogorov comparison is exact in integers.
pub fn determinism_infeasible(n: u64, m: u64, bound: Bound) -> Result<Feasibility> {
    let b = bit_budget(n, m)?;
    let (required_bits, infeasible) = match bound {
        Bound::Combinatorial => (
            b.combinatorial_bits,
            b.combinatorial_bits - b.available_bits > COMBINATORIAL_SLACK,
        ),
        Bound::Kolmogorov => (
            b.kolmogorov_bits as f64,
            exceeds_capacity(b.kolmogorov_bits, n),
        ),
    };
    Ok(Feasibility {
        required_bits,
        available_bits: b.available_bits,
        margin: required_bits - b.available_bits,
        infeasible,
    })
}

/// Bit accounting for non-contextual value assignments: one bit per
/// projector, with the projector count supplied by the caller.
pub fn projector_bits(n: u64, projectors: u64) -> Result<Feasibility> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("need N >= 2, got {n}")));
    }
    let available_bits = (n as f64).log2();
    Ok(Feasibility {
        required_bits: projectors as f64,
        available_bits,
        margin: projectors as f64 - available_bits,
        infeasible: exceeds_capacity(projectors, n),
    })
}

/// Projectors in a complete family of `N + 1` unbiased bases.
pub fn mub_projector_count(n: u64) -> Result<u64> {
    n.checked_add(1)
        .and_then(|m| m.checked_mul(n))
        .ok_or_else(|| Error::Overflow(format!("N(N+1) for N={n}")))
}

/// One row of the storage-budget table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeficitRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub available: f64,
    #[serde(rename = "kolm_M2")]
    pub kolm_m2: u64,
    #[serde(rename = "comb_M3")]
    pub comb_m3: f64,
    /// Determinism storable with two contexts under the Kolmogorov bound.
    pub feasible: bool,
}

pub const DEFICIT_HEADER: &str = "N,available,kolm_M2,comb_M3,feasible";

pub fn deficit_table(ns: &[u64]) -> Result<Vec<DeficitRow>> {
    ns.iter()
        .map(|&n| {
            let two = bit_budget(n, 2)?;
            let three = bit_budget(n, 3)?;
            Ok(DeficitRow {
                n,
                available: two.available_bits,
                kolm_m2: two.kolmogorov_bits,
                comb_m3: three.combinatorial_bits,
                feasible: !determinism_infeasible(n, 2, Bound::Kolmogorov)?.infeasible,
            })
        })
        .collect()
}

/// `N^{M-1}`: outcome tables for `M - 1` bases beyond the one the state fixes.
pub fn assignment_count(n: u64, m: u64) -> Result<u64> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameters(format!("need N, M >= 1, got N={n}, M={m}")));
    }
    let exp = u32::try_from(m - 1).map_err(|_| Error::Overflow(format!("N^(M-1), M={m}")))?;
    n.checked_pow(exp)
        .ok_or_else(|| Error::Overflow(format!("N^(M-1) for N={n}, M={m}")))
}

/// Brute-force count of maps from `M - 1` bases to `N` outcomes, walking an
/// odometer over all tables.
pub fn enumerate_assignments(n: u64, m: u64) -> Result<u64> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameters(format!("need N, M >= 1, got N={n}, M={m}")));
    }
    let slots = (m - 1) as usize;
    let mut digits = vec![0u64; slots];
    let mut count = 0u64;
    loop {
        count += 1;
        if count > ENUMERATION_LIMIT {
            return Err(Error::InvalidParameters(format!(
                "more than {ENUMERATION_LIMIT} assignments for N={n}, M={m}"
            )));
        }
        let mut i = 0;
        loop {
            if i == slots {
                return Ok(count);
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_budget_examples() {
        let b = bit_budget(3, 3).unwrap();
        assert!((b.combinatorial_bits - 2.0 * 3f64.log2()).abs() < 1e-15);
        assert!(b.combinatorial_bits > b.available_bits);

        let b = bit_budget(4, 2).unwrap();
        assert_eq!(b.kolmogorov_bits, 3);
        assert_eq!(b.available_bits, 2.0);

        let b = bit_budget(2, 2).unwrap();
        assert_eq!(b.kolmogorov_bits, 1);
        assert_eq!(b.available_bits, 1.0);

        assert!(bit_budget(1, 3).is_err());
        assert!(bit_budget(3, 1).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = deficit_table(&[2, 4, 8, 16]).unwrap();
        let want = [(1.0, 1, 2.0, true), (2.0, 3, 4.0, false), (3.0, 7, 6.0, false), (4.0, 15, 8.0, false)];
        for (r, w) in rows.iter().zip(want.iter()) {
            assert_eq!((r.available, r.kolm_m2, r.comb_m3, r.feasible), *w);
        }
    }

    #[test]
    fn feasibility_examples() {
        let f = determinism_infeasible(3, 3, Bound::Combinatorial).unwrap();
        assert!(f.infeasible);
        assert!((f.margin - 3f64.log2()).abs() < 1e-12);

        let f = determinism_infeasible(2, 2, Bound::Kolmogorov).unwrap();
        assert!(!f.infeasible);
        assert_eq!(f.margin, 0.0);

        let f = determinism_infeasible(4, 2, Bound::Kolmogorov).unwrap();
        assert!(f.infeasible);
        assert_eq!(f.margin, 1.0);

        // combinatorial with M = 2 sits exactly on the capacity
        assert!(!determinism_infeasible(5, 2, Bound::Combinatorial).unwrap().infeasible);
    }

    #[test]
    fn assignment_counts() {
        assert_eq!(assignment_count(3, 3).unwrap(), 9);
        assert_eq!(enumerate_assignments(3, 3).unwrap(), 9);
        assert_eq!(assignment_count(2, 2).unwrap(), 2);
        assert_eq!(enumerate_assignments(2, 2).unwrap(), 2);
        assert!(matches!(assignment_count(10, 25), Err(Error::Overflow(_))));
        assert!(enumerate_assignments(10, 8).is_err());
    }

    #[test]
    fn projector_accounting() {
        let count = mub_projector_count(3).unwrap();
        assert_eq!(count, 12);
        let f = projector_bits(3, count).unwrap();
        assert!(f.infeasible);
        assert!(!projector_bits(4, 2).unwrap().infeasible);
    }
}
