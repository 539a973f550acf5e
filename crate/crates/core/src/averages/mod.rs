//! Logarithmic and uniform averages and defect measurements for the
//! averaging inequalities (shifts, residue splits, dilations, Elliott).

mod defects;
mod function;

pub use defects::{
    dilate_defect, elliott_defect, frobenius_defect, residue_split_defect, shift_defect,
};
pub use function::{suite_rng, ProgressionSums, SampledFunction, BOUND_SLACK};
pub(crate) use function::rng_f64;

use crate::error::{domain, range, Result};
use crate::numtheory::{harmonic_int, ComplexKahan};
use num_complex::Complex64;
use serde::Serialize;

/// Which average an operation uses over `n in [N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AvgMode {
    Log,
    Uniform,
}

impl std::str::FromStr for AvgMode {
    type Err = crate::LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(AvgMode::Log),
            "uniform" => Ok(AvgMode::Uniform),
            _ => Err(crate::LabError::Config(format!("unknown average mode '{s}'"))),
        }
    }
}

/// Measured side of an inequality against its explicit bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectRecord {
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub params: Vec<(String, f64)>,
}

impl DefectRecord {
    pub fn new(lhs: f64, bound: f64, params: Vec<(String, f64)>) -> Self {
        let lhs = lhs.max(0.0);
        let ratio = if bound > 0.0 {
            lhs / bound
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            lhs,
            bound,
            ratio,
            params,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// `k=v;k=v` rendering used in CSV rows.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn check_n(n: u64) -> Result<()> {
    if n < 1 {
        return domain("N must be at least 1");
    }
    if n > i64::MAX as u64 / 4 {
        return domain(format!("N = {n} is too large"));
    }
    Ok(())
}

/// `(sum_{n <= N} g(n)/n) / H_N`.
pub fn log_mean_by(n_max: u64, g: impl Fn(i64) -> Complex64) -> Complex64 {
    let mut acc = ComplexKahan::new();
    for n in 1..=n_max as i64 {
        acc.add(g(n) / n as f64);
    }
    acc.value() / harmonic_int(n_max)
}

/// `(1/N) sum_{n <= N} g(n)`.
pub fn uniform_mean_by(n_max: u64, g: impl Fn(i64) -> Complex64) -> Complex64 {
    let mut acc = ComplexKahan::new();
    for n in 1..=n_max as i64 {
        acc.add(g(n));
    }
    acc.value() / n_max as f64
}

pub fn mean_by(mode: AvgMode, n_max: u64, g: impl Fn(i64) -> Complex64) -> Complex64 {
    match mode {
        AvgMode::Log => log_mean_by(n_max, g),
        AvgMode::Uniform => uniform_mean_by(n_max, g),
    }
}

/// Logarithmic average of `f` over `[N]`.
pub fn log_avg(f: &SampledFunction, n: u64) -> Result<Complex64> {
    check_n(n)?;
    if n as i64 > f.hi() {
        return range(format!("N = {n} exceeds the sampled range (hi = {})", f.hi()));
    }
    Ok(log_mean_by(n, |m| f.eval(m)))
}

/// Uniform average of `f` over `[N]`.
pub fn uniform_avg(f: &SampledFunction, n: u64) -> Result<Complex64> {
    check_n(n)?;
    if n as i64 > f.hi() {
        return range(format!("N = {n} exceeds the sampled range (hi = {})", f.hi()));
    }
    Ok(uniform_mean_by(n, |m| f.eval(m)))
}
