use super::{collect_rows, check_row, grid_size, half_spectrum, DiophReport, ScanOptions};
use crate::error::{capacity, domain, Result};
use crate::numtheory::{best_exact, dyadic_fraction, e, frac_mul_pow, min_joint_obligation, smallest_within, ComplexKahan, MultiplicativeTables};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct WeylOptions {
    /// Structure exponent `E`: `q <= eps^-E`, `||q theta|| <= eps^-E X^-m`.
    pub exponent: f64,
    pub scan: ScanOptions,
}

impl Default for WeylOptions {
    fn default() -> Self {
        Self {
            exponent: 6.0,
            scan: ScanOptions::default(),
        }
    }
}

fn tables(x: u64) -> Result<MultiplicativeTables> {
    if x == 0 {
        return domain("X must be positive");
    }
    MultiplicativeTables::new(x as usize)
}

fn check_m(x: u64, m: u32) -> Result<f64> {
    if m == 0 {
        return domain("degree m must be positive");
    }
    let xm = (x as f64).powi(m as i32);
    if xm >= 2f64.powi(62) {
        return capacity(format!("X^m = {xm:.3e} exceeds 2^62"));
    }
    Ok(xm)
}

/// `sum_{n <= X} Lambda(n) e(theta n^m)`, unnormalized.
pub fn vonmangoldt_exp_sum(x: u64, m: u32, theta: f64) -> Result<Complex64> {
    if m == 0 {
        return domain("degree m must be positive");
    }
    let t = tables(x)?;
    Ok(sum_with(&t, x, m, theta))
}

fn sum_with(t: &MultiplicativeTables, x: u64, m: u32, theta: f64) -> Complex64 {
    let mut acc = ComplexKahan::new();
    for n in 2..=x {
        let l = t.vonmangoldt[n as usize];
        if l != 0.0 {
            acc.add(e(frac_mul_pow(theta, n, m)) * l);
        }
    }
    acc.value()
}

/// Scans `theta` for `|S(theta)| >= eps X` and checks the structure
/// conclusion at every flagged grid point.
///
/// Centred at `X^m / 2`, `|d S / d theta| <= pi psi(X) X^m`, so the grid
/// `M >= 2 pi psi(X) X^m / (eps X)` loses at most `eps / 4` of the
/// normalized sum between a frequency and its nearest grid point.
pub fn weyl_structure_scan(x: u64, m: u32, eps: f64, opts: WeylOptions) -> Result<DiophReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0, 1)");
    }
    let xm = check_m(x, m)?;
    let t = tables(x)?;
    let psi = t.chebyshev_psi(x as usize);
    let xf = x as f64;
    let grid = match opts.scan.grid_size {
        Some(g) => g.max(2).next_power_of_two(),
        None => grid_size(2.0 * PI * psi * xm / (eps * xf), opts.scan.grid_budget, |g| {
            2.0 * PI * psi * xm / (g * xf)
        })?,
    };
    if grid > opts.scan.grid_budget {
        return capacity(format!("grid size {grid} exceeds budget {}", opts.scan.grid_budget));
    }
    let margin = PI * psi * xm / (2.0 * grid as f64 * xf);
    let mask = grid as u64 - 1;
    let mut bins = vec![Complex64::default(); grid];
    for n in 2..=x {
        let l = t.vonmangoldt[n as usize];
        if l != 0.0 {
            bins[(n.wrapping_pow(m) & mask) as usize] += l;
        }
    }
    let spec = half_spectrum(bins);
    let budget = eps.powf(-opts.exponent);
    let base = (1.0 / eps).ln();
    let rows = |k: usize| {
        let a = spec[k] / xf;
        (a >= eps - margin).then(|| check_row(k as u64, grid as u64, a, eps, budget, xm, base))
    };
    Ok(collect_rows(spec.len(), grid as u64, margin, opts.scan.max_rows, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylPoint {
    pub theta: f64,
    /// `|S(theta)| / X`.
    pub abs_sum: f64,
    pub flagged: bool,
    pub q: Option<u64>,
    pub err: f64,
    /// Smallest `E` whose conclusion holds at this `theta`.
    pub exponent_min: f64,
    pub pass: bool,
}

/// Structure check at one frequency, using the exact dyadic value of
/// `theta`.
pub fn weyl_point(x: u64, m: u32, theta: f64, eps: f64, exponent: f64) -> Result<WeylPoint> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0, 1)");
    }
    let xm = check_m(x, m)?;
    let t = tables(x)?;
    let abs_sum = sum_with(&t, x, m, theta).norm() / x as f64;
    let flagged = abs_sum >= eps;
    let (num, den) = dyadic_fraction(theta);
    let budget = eps.powf(-exponent);
    let bound = budget / xm;
    let (_, obligation) = min_joint_obligation(num, den, xm);
    let exponent_min = (obligation.ln() / (1.0 / eps).ln()).max(0.0);
    let (_, best_d) = best_exact(num, den, budget.floor().max(1.0) as u64);
    let best_ok = best_d as f64 / den as f64 <= bound;
    let hit = if best_ok { smallest_within(num, den, bound) } else { None };
    let (q, err) = match hit {
        Some((q, d)) => (Some(q), d as f64 / den as f64),
        None => (None, best_d as f64 / den as f64),
    };
    Ok(WeylPoint {
        theta,
        abs_sum,
        flagged,
        q,
        err,
        exponent_min,
        pass: !flagged || hit.is_some(),
    })
}
