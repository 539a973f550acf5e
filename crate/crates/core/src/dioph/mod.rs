//! Exponential-sum spectra, `(L, L', D)`-diophantine verification,
//! almost-prime families with their coprimality statistic, von Mangoldt
//! polynomial-phase sums and the concatenation statistics.

mod concat;
mod family;
mod vino;
mod weyl;

pub use concat::{concat_conclusion_search, concat_hypothesis, concat_hypothesis_differenced};
pub use family::{
    coprimality_check, gamma_coprimality, gamma_exact, AlmostPrimeFamily, CoprimalityCheck, EPS0,
};
pub use vino::{vino_draw, vino_suite, vino_verify, VinoResult, VinoSuite};
pub use weyl::{vonmangoldt_exp_sum, weyl_point, weyl_structure_scan, WeylOptions, WeylPoint};

use crate::error::{capacity, domain, Result};
use crate::numtheory::{best_exact, e_mul, min_joint_obligation, smallest_within, ComplexKahan};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest spectrum grid (points on `R/Z`) a scan may allocate.
pub const DEFAULT_GRID_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiophParams {
    pub l: f64,
    pub lp: f64,
    pub d: f64,
}

impl DiophParams {
    pub fn new(l: f64, lp: f64, d: f64) -> Result<Self> {
        if !(l >= 1.0 && lp >= 1.0 && d > 0.0) {
            return domain(format!("need L >= 1, L' >= 1, D > 0 (got {l}, {lp}, {d})"));
        }
        Ok(Self { l, lp, d })
    }

    /// `(L'/delta)^L`.
    pub fn budget(&self, delta: f64) -> f64 {
        (self.lp / delta).powf(self.l)
    }
}

/// One flagged frequency `theta = k / M` of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophRow {
    pub k: u64,
    pub m: u64,
    pub theta: f64,
    /// `|E_s e(theta s)|` (or `|S(theta)|/X` for von Mangoldt scans).
    pub abs_sum: f64,
    /// Strongest level the row is held to.
    pub delta: f64,
    /// Witness when `pass`, otherwise the best denominator under the cap.
    pub q: u64,
    pub err: f64,
    pub q_bound: f64,
    pub err_bound: f64,
    /// Smallest exponent (`L`, or `E` for von Mangoldt scans) that passes.
    pub exponent_min: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophSummary {
    pub grid_size: u64,
    /// Largest possible drop of the sum between a frequency and its
    /// nearest grid point; flagging is lowered by this much.
    pub margin: f64,
    pub flagged: u64,
    pub passes: u64,
    pub failures: u64,
    pub rows_dropped: u64,
    pub max_exponent_min: f64,
    /// `min (err_bound - err)/err_bound` over flagged rows.
    pub min_err_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophReport {
    pub rows: Vec<DiophRow>,
    pub summary: DiophSummary,
}

impl DiophReport {
    pub fn pass(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "k", "M", "theta", "abs_sum", "delta", "q", "err", "q_bound", "err_bound", "exponent_min", "pass",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.k.to_string(),
                r.m.to_string(),
                format!("{:e}", r.theta),
                format!("{:e}", r.abs_sum),
                r.delta.to_string(),
                r.q.to_string(),
                format!("{:e}", r.err),
                format!("{:e}", r.q_bound),
                format!("{:e}", r.err_bound),
                format!("{:e}", r.exponent_min),
                (r.pass as u8).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Grid size override (rounded up to a power of two).
    pub grid_size: Option<usize>,
    pub grid_budget: usize,
    /// Passing rows kept in the report; failures are always kept.
    pub max_rows: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_size: None,
            grid_budget: DEFAULT_GRID_BUDGET,
            max_rows: 10_000,
        }
    }
}

/// `E_{s in S} e(theta s)` with exact phase reduction.
pub fn exp_sum(s: &[i64], theta: f64) -> Result<Complex64> {
    if s.is_empty() {
        return domain("exponential sum over an empty set");
    }
    let acc: ComplexKahan = s.iter().map(|&x| e_mul(theta, x as i128)).collect();
    Ok(acc.value() / s.len() as f64)
}

/// `|sum_j w_j e(k r_j / M)|` for `k = 0..=M/2`, by one inverse FFT of the
/// binned weights (`bins[r] = sum of w_j with r_j = r`).
pub(crate) fn half_spectrum(bins: Vec<Complex64>) -> Vec<f64> {
    let m = bins.len();
    let mut buf = bins;
    FftPlanner::<f64>::new().plan_fft_inverse(m).process(&mut buf);
    buf.truncate(m / 2 + 1);
    buf.into_iter().map(|z| z.norm()).collect()
}

/// Smallest power of two at least `need`, or a capacity error naming the
/// level that would fit.
pub(crate) fn grid_size(need: f64, budget: usize, floor_at: impl Fn(f64) -> f64) -> Result<usize> {
    let need = need.max(64.0);
    if need > budget as f64 {
        let m = 1usize << (usize::BITS - 1 - budget.leading_zeros());
        return capacity(format!(
            "spectrum grid needs {need:.3e} points, budget is {budget}; coarsest feasible level is about {:.3e}",
            floor_at(m as f64)
        ));
    }
    Ok((need.ceil() as usize).next_power_of_two())
}

/// Checks the `(L, L', D)`-diophantine property of `S` on a certified
/// frequency grid.
///
/// `|E e(theta s)|` depends on `S` only up to translation; centred, its
/// derivative is at most `pi diam(S)`, so between a frequency and the
/// nearest of `M` grid points the sum drops by at most
/// `pi diam(S) / (2M)`. The grid takes `M >= 2 pi diam(S) / delta_min`
/// (margin `<= delta_min / 4`) and flags every grid point whose sum is at
/// least a level minus the margin. Each flagged `theta = k/M` is held to the
/// largest such level `delta`: pass iff some `q <= (L'/delta)^L` has
/// `||q theta|| <= (L'/delta)^L / D`.
pub fn dioph_verify(s: &[i64], params: DiophParams, deltas: &[f64], opts: ScanOptions) -> Result<DiophReport> {
    if s.is_empty() {
        return domain("S must be nonempty");
    }
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return domain("delta levels must lie in (0, 1]");
    }
    let mut levels = deltas.to_vec();
    levels.sort_by(f64::total_cmp);
    let dmin = levels[0];
    let lo = *s.iter().min().unwrap();
    let hi = *s.iter().max().unwrap();
    let diam = (hi as i128 - lo as i128) as f64;
    let m = match opts.grid_size {
        Some(g) => g.max(2).next_power_of_two(),
        None => grid_size(2.0 * PI * diam / dmin, opts.grid_budget, |m| 2.0 * PI * diam / m)?,
    };
    if m > opts.grid_budget {
        return capacity(format!("grid size {m} exceeds budget {}", opts.grid_budget));
    }
    if (m as f64) <= diam {
        return domain(format!("grid size {m} does not exceed diam(S) = {diam}"));
    }
    let margin = PI * diam / (2.0 * m as f64);
    let mut bins = vec![Complex64::default(); m];
    let w = 1.0 / s.len() as f64;
    for &x in s {
        bins[((x as i128 - lo as i128) as u64 % m as u64) as usize] += w;
    }
    let spec = half_spectrum(bins);
    let rows = |k: usize| {
        let a = spec[k];
        levels.iter().rev().find(|&&d| a >= d - margin).map(|&delta| {
            check_row(k as u64, m as u64, a, delta, params.budget(delta), params.d, (params.lp / delta).ln())
        })
    };
    Ok(collect_rows(spec.len(), m as u64, margin, opts.max_rows, rows))
}

/// Pass iff some `q <= budget` has `||q k/m|| <= budget / d`; the
/// reported exponent is `log(min_q max(q, d ||q theta||)) / base`.
pub(crate) fn check_row(k: u64, m: u64, abs_sum: f64, delta: f64, budget: f64, d: f64, base: f64) -> DiophRow {
    let err_bound = budget / d;
    let cap = budget.floor().max(1.0) as u64;
    let (best_q, dist) = best_exact(k, m, cap);
    let pass = budget >= 1.0 && dist as f64 / m as f64 <= err_bound;
    let (q, dist) = if pass {
        smallest_within(k, m, err_bound).unwrap_or((best_q, dist))
    } else {
        (best_q, dist)
    };
    let (_, obligation) = min_joint_obligation(k, m, d);
    let exponent_min = if base > 0.0 {
        (obligation.ln() / base).max(0.0)
    } else if obligation <= 1.0 {
        0.0
    } else {
        f64::INFINITY
    };
    DiophRow {
        k,
        m,
        theta: k as f64 / m as f64,
        abs_sum,
        delta,
        q,
        err: dist as f64 / m as f64,
        q_bound: budget,
        err_bound,
        exponent_min,
        pass,
    }
}

/// Evaluates `row` on `0..n` in parallel chunks, aggregating in index
/// order so the report does not depend on scheduling. The full flagged set
/// is never held in memory.
pub(crate) fn collect_rows<F>(n: usize, m: u64, margin: f64, max_rows: usize, row: F) -> DiophReport
where
    F: Fn(usize) -> Option<DiophRow> + Sync,
{
    const CHUNK: usize = 1 << 16;
    let mut summary = DiophSummary {
        grid_size: m,
        margin,
        flagged: 0,
        passes: 0,
        failures: 0,
        rows_dropped: 0,
        max_exponent_min: 0.0,
        min_err_slack: f64::INFINITY,
    };
    let mut kept = Vec::new();
    let mut kept_pass = 0usize;
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        let chunk: Vec<DiophRow> = (start..end).into_par_iter().filter_map(&row).collect();
        for r in chunk {
            summary.flagged += 1;
            summary.max_exponent_min = summary.max_exponent_min.max(r.exponent_min);
            summary.min_err_slack = summary.min_err_slack.min((r.err_bound - r.err) / r.err_bound);
            if r.pass {
                summary.passes += 1;
                if kept_pass < max_rows {
                    kept_pass += 1;
                    kept.push(r);
                } else {
                    summary.rows_dropped += 1;
                }
            } else {
                summary.failures += 1;
                kept.push(r);
            }
        }
    }
    DiophReport { rows: kept, summary }
}

#[cfg(test)]
mod tests;
