//! Uniform pass/fail record emitted by every verification.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "~=")]
    Approx,
}

impl Comparator {
    pub fn holds(self, value: f64, bound: f64, tolerance: f64) -> bool {
        match self {
            Comparator::AtMost => value <= bound + tolerance,
            Comparator::AtLeast => value >= bound - tolerance,
            Comparator::Approx => (value - bound).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::AtMost => "<=",
            Comparator::AtLeast => ">=",
            Comparator::Approx => "~=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_owned())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// Builds a [`Params`] map from `key => value` pairs.
#[macro_export]
macro_rules! params {
    () => { $crate::report::Params::new() };
    ($($k:expr => $v:expr),+ $(,)?) => {{
        let mut m = $crate::report::Params::new();
        $( m.insert(String::from($k), $crate::report::ParamValue::from($v)); )+
        m
    }};
}

/// One verification outcome. `pass` is always `comparator(value, bound, tolerance)`.
///
/// Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: Params,
    pub value: f64,
    pub bound: f64,
    pub comparator: Comparator,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u64,
}

impl CheckReport {
    pub fn new(
        check_name: impl Into<String>,
        params: Params,
        value: f64,
        bound: f64,
        comparator: Comparator,
        tolerance: f64,
    ) -> Self {
        Self {
            check_name: check_name.into(),
            params,
            value,
            bound,
            comparator,
            tolerance,
            pass: comparator.holds(value, bound, tolerance),
            runtime_ms: 0,
        }
    }

    pub fn at_most(name: impl Into<String>, params: Params, value: f64, bound: f64) -> Self {
        Self::new(name, params, value, bound, Comparator::AtMost, 0.0)
    }

    pub fn at_least(name: impl Into<String>, params: Params, value: f64, bound: f64) -> Self {
        Self::new(name, params, value, bound, Comparator::AtLeast, 0.0)
    }

    pub fn approx(
        name: impl Into<String>,
        params: Params,
        value: f64,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        Self::new(name, params, value, bound, Comparator::Approx, tolerance)
    }

    /// Re-derives `pass` from the other fields.
    pub fn is_consistent(&self) -> bool {
        self.pass == self.comparator.holds(self.value, self.bound, self.tolerance)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} value={:e} {} bound={:e} (tol {:e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_name,
            self.value,
            self.comparator,
            self.bound,
            self.tolerance
        )
    }
}
