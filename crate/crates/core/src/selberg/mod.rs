//! Selberg-type majorant for the primes on `[X, 2X)`, its expansion in
//! Ramanujan sums and the periodic-plus-bands decomposition.

mod bands;

pub use bands::{band_decompose, verify_sieve_bounds, Band, BandDecomposition, SieveReport};

use crate::error::{capacity, domain, Result};
use crate::numtheory::{euler_phi, factorize, is_squarefree, mobius, ramanujan_squarefree, KahanSum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Largest `R^2` the expansion accepts.
pub const MAX_LEVEL_SQUARED: f64 = 1e5;
/// Largest `X` for which `[X, 2X)` tables are built.
pub const MAX_X: u64 = 20_000_000;

/// Normalizing constant `Z` in `Z^-1 (sum_{q <= R} mu(q)/phi(q) c_q(n))^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    /// `sum_{q <= R} mu(q)^2 / phi(q)`, so that `Lambda~(p) = Z` for primes `p > R`.
    #[default]
    MuSquared,
    /// `sum_{q <= R} mu(q) / phi(q)`.
    Mu,
}

impl FromStr for Normalizer {
    type Err = crate::LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu2" | "mu-squared" => Ok(Self::MuSquared),
            "mu" => Ok(Self::Mu),
            _ => Err(crate::LabError::Config(format!("unknown normalizer '{s}' (mu2 | mu)"))),
        }
    }
}

/// Squarefree modulus with its prime factors.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Modulus {
    pub q: u64,
    pub primes: Vec<u64>,
}

impl Modulus {
    fn new(q: u64) -> Self {
        Self {
            q,
            primes: factorize(q).into_iter().map(|(p, _)| p).collect(),
        }
    }

    #[inline]
    pub fn ramanujan(&self, n: u64) -> f64 {
        ramanujan_squarefree(&self.primes, n) as f64
    }
}

/// The sieve weights `mu(q)/phi(q)` for squarefree `q <= R`.
#[derive(Debug, Clone)]
pub struct SelbergSieve {
    pub r: f64,
    pub normalizer: f64,
    pub kind: Normalizer,
    weights: Vec<(Modulus, f64)>,
}

impl SelbergSieve {
    pub fn new(r: f64, kind: Normalizer) -> Result<Self> {
        if !(r >= 3.0) {
            return domain(format!("sieve level R = {r} is degenerate; need R >= 3"));
        }
        if r * r > MAX_LEVEL_SQUARED {
            return capacity(format!("R^2 = {:.0} exceeds {MAX_LEVEL_SQUARED}", r * r));
        }
        let top = r.floor() as u64;
        let weights: Vec<(Modulus, f64)> = (1..=top)
            .filter(|&q| is_squarefree(q))
            .map(|q| (Modulus::new(q), mobius(q) as f64 / euler_phi(q) as f64))
            .collect();
        let z: KahanSum = weights
            .iter()
            .map(|(m, w)| match kind {
                Normalizer::MuSquared => 1.0 / euler_phi(m.q) as f64,
                Normalizer::Mu => *w,
            })
            .collect();
        let normalizer = z.value();
        if normalizer.abs() < 1e-12 {
            return domain(format!("normalizer vanishes at R = {r}"));
        }
        Ok(Self {
            r,
            normalizer,
            kind,
            weights,
        })
    }

    /// `sum_{q <= R} mu(q)/phi(q) c_q(n)`.
    pub fn linear_form(&self, n: u64) -> f64 {
        self.weights.iter().map(|(m, w)| w * m.ramanujan(n)).sum()
    }

    /// `Lambda~(n)`.
    pub fn value(&self, n: u64) -> f64 {
        let s = self.linear_form(n);
        s * s / self.normalizer
    }

    /// `Lambda~` on `[X, 2X)`.
    pub fn table(&self, x: u64) -> Result<Vec<f64>> {
        check_x(x)?;
        Ok((x..2 * x).into_par_iter().map(|n| self.value(n)).collect())
    }

    /// `c_q` with `Lambda~(n) = sum_{q <= R^2} c_q c_q(n)`.
    ///
    /// For squarefree `q1, q2` with `g = (q1, q2)`, `u = q1/g`, `v = q2/g`:
    /// `c_q1 c_q2 = c_uv c_g^2` and `c_g^2 = sum_{e | g} prod_{p | e} (p - 2)
    /// prod_{p | g/e} (p - 1) c_e`, from `c_p^2 = (p - 1) + (p - 2) c_p`.
    pub fn expand(&self) -> SieveCoefficients {
        let mut acc: BTreeMap<u64, KahanSum> = BTreeMap::new();
        for (m1, w1) in &self.weights {
            for (m2, w2) in &self.weights {
                let shared: Vec<u64> = m1.primes.iter().copied().filter(|p| m2.primes.contains(p)).collect();
                let g: u64 = shared.iter().product();
                let uv = (m1.q / g) * (m2.q / g);
                let base = w1 * w2 / self.normalizer;
                // subsets e of the primes of g
                for mask in 0u32..(1 << shared.len()) {
                    let mut e = 1u64;
                    let mut coef = 1.0;
                    for (i, &p) in shared.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            e *= p;
                            coef *= p as f64 - 2.0;
                        } else {
                            coef *= p as f64 - 1.0;
                        }
                    }
                    if coef != 0.0 {
                        acc.entry(uv * e).or_default().add(base * coef);
                    }
                }
            }
        }
        let c = acc
            .into_iter()
            .map(|(q, s)| (q, s.value()))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        SieveCoefficients {
            r: self.r,
            normalizer: self.normalizer,
            kind: self.kind,
            c,
        }
    }
}

pub(crate) fn check_x(x: u64) -> Result<()> {
    if x < 2 {
        return domain("X must be at least 2");
    }
    if x > MAX_X {
        return capacity(format!("X = {x} exceeds table budget {MAX_X}"));
    }
    Ok(())
}

/// Ramanujan-basis coefficients of the majorant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveCoefficients {
    pub r: f64,
    pub normalizer: f64,
    pub kind: Normalizer,
    /// `q -> c_q`, squarefree `q <= R^2`.
    pub c: BTreeMap<u64, f64>,
}

impl SieveCoefficients {
    pub fn moduli(&self) -> Vec<(u64, f64)> {
        self.c.iter().map(|(&q, &v)| (q, v)).collect()
    }

    /// `sum_q c_q c_q(n)`.
    pub fn eval(&self, n: u64) -> f64 {
        self.c
            .iter()
            .map(|(&q, &v)| v * Modulus::new(q).ramanujan(n))
            .collect::<KahanSum>()
            .value()
    }

    /// `max_q |c_q| q / tau(q)^2`.
    pub fn envelope_ratio(&self) -> f64 {
        self.c
            .iter()
            .map(|(&q, &v)| {
                let t = crate::numtheory::tau(q) as f64;
                v.abs() * q as f64 / (t * t)
            })
            .fold(0.0, f64::max)
    }
}

/// `Lambda~` on `[X, 2X)`.
pub fn selberg_majorant(x: u64, r: f64, kind: Normalizer) -> Result<Vec<f64>> {
    SelbergSieve::new(r, kind)?.table(x)
}

pub fn ramanujan_expand(r: f64, kind: Normalizer) -> Result<SieveCoefficients> {
    Ok(SelbergSieve::new(r, kind)?.expand())
}

#[cfg(test)]
mod tests;
