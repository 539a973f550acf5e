use super::{check_x, Modulus, Normalizer, SelbergSieve, SieveCoefficients};
use crate::error::{capacity, domain, Result};
use crate::numtheory::{sieve_primes, KahanSum};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest `Q` accepted (so that `Q!` stays a 64-bit period).
pub const MAX_Q: u64 = 20;

/// `f_i` split at the threshold `2^(i c / 2)` into `g_i` (small values) and
/// `g'_i` (large values).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub index: u64,
    /// Moduli `q_lo < q <= q_hi`.
    pub q_lo: u64,
    pub q_hi: u64,
    pub tail: bool,
    pub threshold: f64,
    pub moduli: Vec<u64>,
    pub g: Vec<f64>,
    pub gprime: Vec<f64>,
}

impl Band {
    pub fn f(&self, i: usize) -> f64 {
        self.g[i] + self.gprime[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandDecomposition {
    pub x: u64,
    pub r: f64,
    pub q: u64,
    pub cexp: f64,
    pub a: f64,
    pub i0: u64,
    pub i1: u64,
    /// Least period of `lam_per`: the product of the primes up to `2^i0`
    /// (a divisor of `Q!`).
    pub period: u64,
    pub coefficients: SieveCoefficients,
    /// `Lambda~` on `[X, 2X)`, from the squared linear form.
    pub majorant: Vec<f64>,
    pub lam_per: Vec<f64>,
    /// Bands with at least one modulus; the rest are identically zero.
    pub bands: Vec<Band>,
    pub h: Vec<f64>,
}

impl BandDecomposition {
    /// `max |Lambda~ - Lambda_per - sum g_i - h| / max(1, |Lambda~|)`.
    pub fn telescoping_error(&self) -> f64 {
        (0..self.majorant.len())
            .map(|i| {
                let rest: f64 = self.bands.iter().map(|b| b.g[i]).sum::<f64>() + self.h[i];
                (self.majorant[i] - self.lam_per[i] - rest).abs() / self.majorant[i].abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn table_of(x: u64, moduli: &[(Modulus, f64)]) -> Vec<f64> {
    (x..2 * x)
        .into_par_iter()
        .map(|n| moduli.iter().map(|(m, c)| c * m.ramanujan(n)).collect::<KahanSum>().value())
        .collect()
}

/// Splits `Lambda~ = Lambda_per + sum_i g_i + h`.
///
/// `Lambda_per` takes `q <= 2^i0`, band `i` (for `i0 <= i < i1`) takes
/// `2^i < q <= 2^(i+1)` and the tail takes `q > max(2^i0, 2^i1)`, with
/// `i0 = floor(log2 Q)` and `i1 = floor(A log2 log X)`.
pub fn band_decompose(x: u64, r: f64, q: u64, cexp: f64, a: f64, kind: Normalizer) -> Result<BandDecomposition> {
    check_x(x)?;
    if q == 0 || q > MAX_Q {
        return capacity(format!("Q = {q} must lie in [1, {MAX_Q}]"));
    }
    let logx = (x as f64).ln();
    if q as f64 > logx {
        return domain(format!("need Q <= log X = {logx:.3} (got {q})"));
    }
    if !(cexp > 0.0 && cexp < 1.0) {
        return domain("c must lie in (0, 1)");
    }
    if !(a > 0.0) {
        return domain("A must be positive");
    }
    let sieve = SelbergSieve::new(r, kind)?;
    let coefficients = sieve.expand();
    let i0 = 63 - q.leading_zeros() as u64;
    let i1 = (a * logx.log2()).floor().max(0.0) as u64;
    let per_top = 1u64 << i0;
    let tail_lo = 1u64 << i0.max(i1).min(62);
    let moduli: Vec<(Modulus, f64)> = coefficients.c.iter().map(|(&m, &v)| (Modulus::new(m), v)).collect();
    let pick = |lo: u64, hi: u64| -> Vec<(Modulus, f64)> {
        moduli.iter().filter(|(m, _)| m.q > lo && m.q <= hi).cloned().collect()
    };
    let majorant = sieve.table(x)?;
    let per = pick(0, per_top);
    let lam_per = table_of(x, &per);
    let period = per
        .iter()
        .flat_map(|(m, _)| m.primes.iter().copied())
        .fold(std::collections::BTreeSet::new(), |mut s, p| {
            s.insert(p);
            s
        })
        .into_iter()
        .product();
    let mut slots: Vec<(u64, u64, u64, bool)> = (i0..i1).map(|i| (i, 1u64 << i, 1u64 << (i + 1), false)).collect();
    slots.push((i1, tail_lo, u64::MAX, true));
    let mut bands = Vec::new();
    let mut h = vec![0.0; x as usize];
    for (index, lo, hi, tail) in slots {
        let ms = pick(lo, hi);
        if ms.is_empty() {
            continue;
        }
        let threshold = 2f64.powf(index as f64 * cexp / 2.0);
        let f = table_of(x, &ms);
        let mut g = vec![0.0; f.len()];
        let mut gprime = vec![0.0; f.len()];
        for (k, &v) in f.iter().enumerate() {
            if v.abs() <= threshold {
                g[k] = v;
            } else {
                gprime[k] = v;
                h[k] += v;
            }
        }
        bands.push(Band {
            index,
            q_lo: lo,
            q_hi: if tail { coefficients.c.keys().last().copied().unwrap_or(1) } else { hi },
            tail,
            threshold,
            moduli: ms.iter().map(|(m, _)| m.q).collect(),
            g,
            gprime,
        });
    }
    Ok(BandDecomposition {
        x,
        r,
        q,
        cexp,
        a,
        i0,
        i1,
        period,
        coefficients,
        majorant,
        lam_per,
        bands,
        h,
    })
}

/// Per-band measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStats {
    pub index: u64,
    pub tail: bool,
    pub g_sup: f64,
    /// Largest `|sum_x g(x) e(theta x)|` on the frequency grid.
    pub g_hat_grid: f64,
    /// Grid value plus the certified discretization error.
    pub g_hat_sup: f64,
    pub f_fourth_moment: f64,
    /// `E|f_i|^4 / (i + 1)^16`.
    pub moment_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveReport {
    pub x: u64,
    pub r: f64,
    pub q: u64,
    pub normalizer: f64,
    pub min_prime_over_log_x: f64,
    pub min_prime_over_log_r: f64,
    pub majorant_min: f64,
    pub majorant_mean: f64,
    pub lam_per_mean_abs: f64,
    pub lam_per_sup: f64,
    /// `sup |Lambda_per| / Q^2`.
    pub lam_per_sup_over_q2: f64,
    pub h_mean_abs: f64,
    /// `Q E|h|`.
    pub h_mean_times_q: f64,
    /// `sum_i ||g^_i||^c ||g_i||^(1-c) Q^(c/4) / X^c`.
    pub band_sum_ratio: f64,
    pub telescoping_error: f64,
    pub envelope_ratio: f64,
    pub grid_size: u64,
    pub bands: Vec<BandStats>,
}

impl SieveReport {
    pub fn moments_pass(&self) -> bool {
        self.bands.iter().all(|b| b.moment_ratio <= 1.0)
    }
}

/// `max_theta |sum_{x in [X, 2X)} g(x) e(theta x)|` over `M >= 32 X` grid
/// points, with the additive error `pi X ||g||_1 / (2M)` of the nearest grid
/// point (the centered sum has derivative at most `pi X ||g||_1`).
fn fourier_sup(g: &[f64]) -> (f64, f64, usize) {
    let m = (32 * g.len()).next_power_of_two();
    let mut buf: Vec<Complex64> = vec![Complex64::default(); m];
    for (i, &v) in g.iter().enumerate() {
        buf[i] = Complex64::new(v, 0.0);
    }
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    let sup = buf[..=m / 2].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let l1: f64 = g.iter().map(|v| v.abs()).sum();
    (sup, sup + PI * g.len() as f64 * l1 / (2.0 * m as f64), m)
}

pub fn verify_sieve_bounds(dec: &BandDecomposition) -> Result<SieveReport> {
    let x = dec.x;
    let xf = x as f64;
    let n = dec.majorant.len() as f64;
    let primes = sieve_primes(2 * x)?.primes_in(x, 2 * x)?;
    let min_prime = primes
        .iter()
        .map(|&p| dec.majorant[(p - x) as usize])
        .fold(f64::INFINITY, f64::min);
    let mean = |v: &[f64]| v.iter().copied().collect::<KahanSum>().value() / n;
    let mean_abs = |v: &[f64]| v.iter().map(|t| t.abs()).collect::<KahanSum>().value() / n;
    let lam_per_sup = dec.lam_per.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let h_mean_abs = mean_abs(&dec.h);
    let c = dec.cexp;
    let mut grid_size = 0u64;
    let mut band_sum = 0.0;
    let mut bands = Vec::new();
    for b in &dec.bands {
        let g_sup = b.g.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let (g_hat_grid, g_hat_sup, m) = fourier_sup(&b.g);
        grid_size = grid_size.max(m as u64);
        band_sum += g_hat_sup.powf(c) * g_sup.powf(1.0 - c);
        let f4 = (0..b.g.len()).map(|i| b.f(i).powi(4)).collect::<KahanSum>().value() / n;
        bands.push(BandStats {
            index: b.index,
            tail: b.tail,
            g_sup,
            g_hat_grid,
            g_hat_sup,
            f_fourth_moment: f4,
            moment_ratio: f4 / ((b.index + 1) as f64).powi(16),
        });
    }
    let qf = dec.q as f64;
    Ok(SieveReport {
        x,
        r: dec.r,
        q: dec.q,
        normalizer: dec.coefficients.normalizer,
        min_prime_over_log_x: min_prime / xf.ln(),
        min_prime_over_log_r: min_prime / dec.r.ln(),
        majorant_min: dec.majorant.iter().copied().fold(f64::INFINITY, f64::min),
        majorant_mean: mean(&dec.majorant),
        lam_per_mean_abs: mean_abs(&dec.lam_per),
        lam_per_sup,
        lam_per_sup_over_q2: lam_per_sup / (qf * qf),
        h_mean_abs,
        h_mean_times_q: h_mean_abs * qf,
        band_sum_ratio: band_sum * qf.powf(c / 4.0) / xf.powf(c),
        telescoping_error: dec.telescoping_error(),
        envelope_ratio: dec.coefficients.envelope_ratio(),
        grid_size,
        bands,
    })
}
