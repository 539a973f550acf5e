//! Progression-bias norms `U^1_log[N; q, H]`, `U^1[N; q, H]`, the
//! averaging projections `Pi_{q,H}` and verifiers for their inequalities.

use crate::averages::{log_mean_by, mean_by, AvgMode, DefectRecord, ProgressionSums, SampledFunction};
use crate::error::{domain, range, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Suite constant in the Pythagoras, maximal and norm-comparison checks.
pub const ERROR_CONSTANT: f64 = 50.0;
/// Constant in the projection-preserves-norm check.
pub const PROJ_CHECK_CONSTANT: f64 = 4.0;
/// Constant in the almost-periodicity check.
pub const ALMOST_PERIOD_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormParams {
    pub n: u64,
    pub q: u64,
    pub h: u64,
}

impl NormParams {
    pub fn new(n: u64, q: u64, h: u64) -> Result<Self> {
        if n == 0 || q == 0 || h == 0 {
            return domain(format!("N, q, H must be positive (got {n}, {q}, {h})"));
        }
        if q.checked_mul(h).is_none_or(|qh| qh > i64::MAX as u64 / 4) {
            return domain("qH overflows");
        }
        Ok(Self { n, q, h })
    }

    /// Present when `qH >= N`, where the error terms stop being small.
    pub fn warning(&self) -> Option<String> {
        (self.q * self.h >= self.n).then(|| {
            format!("qH = {} is not below N = {}; error terms degrade", self.q * self.h, self.n)
        })
    }
}

fn norm_by(f: &SampledFunction, p: NormParams, mode: AvgMode) -> Result<f64> {
    let top = p.n as i64 + (p.q * p.h) as i64;
    f.require_cover(1, top, "U^1 norm")?;
    let ps = ProgressionSums::new(f, p.q, p.h);
    let sq = mean_by(mode, p.n, |m| Complex64::new(ps.mean(m).norm_sqr(), 0.0));
    Ok(sq.re.max(0.0).sqrt())
}

/// `(E^log_{n in [N]} |E_{h in [H]} f(n + hq)|^2)^(1/2)`.
pub fn u1log_norm(f: &SampledFunction, p: NormParams) -> Result<f64> {
    norm_by(f, p, AvgMode::Log)
}

/// `(E_{n in [N]} |E_{h in [H]} f(n + hq)|^2)^(1/2)`.
pub fn u1_norm(f: &SampledFunction, p: NormParams) -> Result<f64> {
    norm_by(f, p, AvgMode::Uniform)
}

/// Points where `Pi_{q,H} f` is computable from the samples of `f`.
pub fn projection_range(f: &SampledFunction, q: u64, hh: u64) -> (i64, i64) {
    let reach = (q * (hh - 1)) as i64;
    (f.lo() + reach, f.hi() - reach)
}

/// `Pi_{q,H} f(n) = E_{h,h' in [H]} f(n + q(h - h'))` on every `n` whose
/// window lies inside the samples: `[lo + q(H-1), hi - q(H-1)]`.
///
/// Two compensated box passes along step `q`, so the cost is linear in
/// the range and independent of `H`.
pub fn project(f: &SampledFunction, q: u64, hh: u64) -> Result<SampledFunction> {
    if q == 0 || hh == 0 {
        return domain("q and H must be positive");
    }
    if hh == 1 {
        return Ok(f.clone());
    }
    let (lo, hi) = projection_range(f, q, hh);
    if hi < lo {
        return range(format!(
            "Pi_{{{q},{hh}}} needs more than the {} samples of f",
            f.values().len()
        ));
    }
    let qi = q as i64;
    let h = hh as i64;
    // W(x) = E_{h in [H]} f(x + hq) on [lo_f - q, hi_f - qH]
    let first = ProgressionSums::new(f, q, hh);
    let w = SampledFunction::new(
        f.lo() - qi,
        (f.lo() - qi..=f.hi() - qi * h).map(|x| first.mean(x)).collect(),
        f.bound(),
    )?;
    // Pi f(n) = E_{h' in [H]} W(n - q h')
    let second = ProgressionSums::new(&w, q, hh);
    let vals = (lo..=hi).map(|n| second.mean(n - qi * (h + 1))).collect();
    SampledFunction::new(lo, vals, f.bound())
}

/// `max_n |Pi f(n + qh) - Pi f(n)|` over every computable `n`, against
/// `2|h|/H`.
pub fn almost_period_defect(f: &SampledFunction, q: u64, hh: u64, h: i64) -> Result<DefectRecord> {
    let p = project(f, q, hh)?;
    let shift = q as i64 * h;
    let (lo, hi) = (p.lo().max(p.lo() - shift), p.hi().min(p.hi() - shift));
    if hi < lo {
        return range(format!("shift qh = {shift} leaves no point inside Pi's range"));
    }
    let mut worst = 0.0f64;
    for n in lo..=hi {
        let d = p.get(n + shift).unwrap() - p.get(n).unwrap();
        worst = worst.max(d.norm());
    }
    Ok(DefectRecord::new(
        worst,
        ALMOST_PERIOD_CONSTANT * h.unsigned_abs() as f64 / hh as f64,
        vec![
            ("q".into(), q as f64),
            ("H".into(), hh as f64),
            ("h".into(), h as f64),
            ("points".into(), (hi - lo + 1) as f64),
        ],
    ))
}

/// Samples needed so that `Pi_{q,H'}` is available on `[1, top]`.
pub fn projected_cover(q: u64, hh: u64, top: i64) -> (i64, i64) {
    let reach = (q * hh.saturating_sub(1)) as i64;
    (1 - reach, top + reach)
}

fn require_projectable(f: &SampledFunction, q: u64, hh: u64, top: i64, what: &str) -> Result<()> {
    let (lo, hi) = projected_cover(q, hh, top);
    f.require_cover(lo, hi, what)
}

/// `||Pi_{q,H'} f - f||_{U^1_log[N; q, H]}` against `4 H'/H`.
pub fn proj_check_defect(f: &SampledFunction, q: u64, h1: u64, hh: u64, n: u64) -> Result<DefectRecord> {
    if h1 > hh {
        return domain(format!("H' = {h1} must not exceed H = {hh}"));
    }
    let p = NormParams::new(n, q, hh)?;
    let top = n as i64 + (q * hh) as i64;
    require_projectable(f, q, h1, top, "projection check")?;
    let pf = project(f, q, h1)?;
    let g = SampledFunction::combine(
        Complex64::new(1.0, 0.0),
        &pf,
        Complex64::new(-1.0, 0.0),
        f,
    )?;
    let lhs = u1log_norm(&g, p)?;
    Ok(DefectRecord::new(
        lhs,
        PROJ_CHECK_CONSTANT * h1 as f64 / hh as f64,
        vec![
            ("q".into(), q as f64),
            ("H1".into(), h1 as f64),
            ("H".into(), hh as f64),
        ],
    ))
}

fn log_sq_norm(g: &SampledFunction, n: u64) -> f64 {
    log_mean_by(n, |m| Complex64::new(g.eval(m).norm_sqr(), 0.0)).re
}

/// Approximate Pythagoras relation between `Pi_{q',H'}` and `Pi_{q,H}`.
///
/// `lhs = ||Pi' f - Pi f||^2`, `bound = ||Pi' f||^2 - ||Pi f||^2 +
/// 50 (log(q'H)/log N + q'H'/(qH))`; the `pass` param is `lhs <= bound`.
pub fn pythagoras_defect(
    f: &SampledFunction,
    q: u64,
    q1: u64,
    hh: u64,
    h1: u64,
    n: u64,
) -> Result<DefectRecord> {
    if q == 0 || q1 == 0 || hh == 0 || h1 == 0 {
        return domain("q, q', H, H' must be positive");
    }
    if q1 % q != 0 {
        return domain(format!("q = {q} does not divide q' = {q1}"));
    }
    if h1 > hh {
        return domain(format!("H' = {h1} must not exceed H = {hh}"));
    }
    if n < 2 {
        return domain("N must be at least 2");
    }
    require_projectable(f, q, hh, n as i64, "Pythagoras check")?;
    require_projectable(f, q1, h1, n as i64, "Pythagoras check")?;
    let pi = project(f, q, hh)?;
    let pi1 = project(f, q1, h1)?;
    let lhs = log_mean_by(n, |m| Complex64::new((pi1.eval(m) - pi.eval(m)).norm_sqr(), 0.0)).re;
    let err = ERROR_CONSTANT
        * (((q1 * hh) as f64).ln() / (n as f64).ln() + (q1 * h1) as f64 / (q * hh) as f64);
    let rhs = log_sq_norm(&pi1, n) - log_sq_norm(&pi, n) + err;
    let pass = lhs <= rhs;
    let mut rec = DefectRecord::new(lhs, rhs, pass_params(pass, &[("q", q), ("q1", q1), ("H", hh), ("H1", h1)]));
    if rhs <= 0.0 && lhs > 0.0 {
        rec.ratio = f64::INFINITY;
    }
    Ok(rec)
}

fn pass_params(pass: bool, xs: &[(&str, u64)]) -> Vec<(String, f64)> {
    let mut v: Vec<(String, f64)> = xs.iter().map(|(k, x)| (k.to_string(), *x as f64)).collect();
    v.push(("pass".into(), pass as u8 as f64));
    v
}

/// Grid of `eta` values for the averaged maximal inequality.
pub const ETA_GRID: [f64; 10] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalReport {
    /// `E^log f g`.
    pub base: f64,
    /// `E^log (Pi f) g`.
    pub projected: f64,
    /// `50 log(Hq)/log N`.
    pub eps: f64,
    /// `projected >= base^2/8 - eps`.
    pub maximal_pass: bool,
    /// `projected >= (eta/8) base - eta^2/8` for every `eta` in the grid.
    pub avg_max_pass: bool,
}

/// Lower bound for `E^log (Pi_{q,H} f) g` in terms of `E^log f g`, for
/// nonnegative 1-bounded `f, g`.
pub fn maximal_lower(f: &SampledFunction, g: &SampledFunction, q: u64, hh: u64, n: u64) -> Result<MaximalReport> {
    if q == 0 || hh == 0 || n < 2 {
        return domain("q, H must be positive and N at least 2");
    }
    for (name, x) in [("f", f), ("g", g)] {
        if !x.is_nonnegative() {
            return domain(format!("{name} must be real and nonnegative"));
        }
        if x.bound() > 1.0 + crate::averages::BOUND_SLACK {
            return domain(format!("{name} must be 1-bounded"));
        }
    }
    require_projectable(f, q, hh, n as i64, "maximal inequality")?;
    g.require_cover(1, n as i64, "maximal inequality")?;
    let pf = project(f, q, hh)?;
    let base = log_mean_by(n, |m| f.eval(m) * g.eval(m)).re;
    let projected = log_mean_by(n, |m| pf.eval(m) * g.eval(m)).re;
    let eps = ERROR_CONSTANT * ((hh * q) as f64).ln() / (n as f64).ln();
    let maximal_pass = projected >= base * base / 8.0 - eps;
    let avg_max_pass = ETA_GRID
        .iter()
        .all(|&eta| projected >= eta / 8.0 * base - eta * eta / 8.0);
    Ok(MaximalReport {
        base,
        projected,
        eps,
        maximal_pass,
        avg_max_pass,
    })
}

/// `||f||_{U^1_log[N;q,H]}` against `||f||_{U^1_log[N;q~,H~]} +
/// 50 (log(Hq)/log N + H~q~/(Hq))`, for `q | q~` and `H~q~ < Hq < N/2`.
pub fn norm_compare_defect(
    f: &SampledFunction,
    q: u64,
    q2: u64,
    hh: u64,
    h2: u64,
    n: u64,
) -> Result<DefectRecord> {
    let p = NormParams::new(n, q, hh)?;
    let p2 = NormParams::new(n, q2, h2)?;
    if q2 % q != 0 {
        return domain(format!("q = {q} does not divide q~ = {q2}"));
    }
    if !(h2 * q2 < hh * q && 2 * hh * q < n) {
        return domain(format!(
            "need H~q~ < Hq < N/2, got H~q~ = {}, Hq = {}, N = {n}",
            h2 * q2,
            hh * q
        ));
    }
    let lhs = u1log_norm(f, p)?;
    let err = ERROR_CONSTANT
        * (((hh * q) as f64).ln() / (n as f64).ln() + (h2 * q2) as f64 / (hh * q) as f64);
    let rhs = u1log_norm(f, p2)? + err;
    Ok(DefectRecord::new(
        lhs,
        rhs,
        pass_params(lhs <= rhs, &[("q", q), ("q2", q2), ("H", hh), ("H2", h2)]),
    ))
}

#[cfg(test)]
mod tests;
