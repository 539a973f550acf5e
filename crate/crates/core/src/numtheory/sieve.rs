//! Segmented Eratosthenes sieve and linear-sieve multiplicative tables.

use crate::error::{capacity, domain, range, Result};

/// Largest sieve limit accepted by default (one bit per integer).
pub const DEFAULT_SIEVE_BUDGET: u64 = 4_000_000_000;

/// Largest limit for the multiplicative tables (about 17 bytes per entry).
pub const DEFAULT_TABLE_BUDGET: usize = 50_000_000;

const SEGMENT: u64 = 1 << 18;

/// Primality bitmap over `[0, limit]`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && (self.bits[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> Vec<u64> {
        self.iter_range(2, self.limit + 1).collect()
    }

    /// Sorted primes in `[lo, hi)`.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if lo < 2 || lo >= hi {
            return domain(format!("primes_in needs 2 <= lo < hi, got [{lo}, {hi})"));
        }
        if hi > self.limit + 1 {
            return range(format!(
                "primes_in: hi = {hi} exceeds sieve limit {}",
                self.limit
            ));
        }
        Ok(self.iter_range(lo, hi).collect())
    }

    fn iter_range(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        (lo..hi).filter(move |&n| self.is_prime(n))
    }

    #[inline]
    fn set(&mut self, n: u64) {
        self.bits[(n >> 6) as usize] |= 1 << (n & 63);
    }
}

/// Exact primality bitmap for `[2, limit]`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

pub fn sieve_primes_with_budget(limit: u64, budget: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return domain(format!("sieve limit must be >= 2, got {limit}"));
    }
    if limit > budget {
        return capacity(format!("sieve limit {limit} exceeds budget {budget}"));
    }
    let words = (limit / 64 + 1) as usize;
    let mut table = PrimeTable {
        limit,
        bits: vec![0; words],
    };

    let root = isqrt(limit);
    // base primes by a plain sieve up to sqrt(limit)
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }

    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            while start <= hi {
                seg[(start - lo) as usize] = false;
                start += p;
            }
        }
        for (i, &flag) in seg[..len].iter().enumerate() {
            if flag {
                table.set(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    Ok(table)
}

/// `floor(sqrt(n))`, exact.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

/// Möbius, Euler phi, divisor count and von Mangoldt on `[0, limit]`.
///
/// Index 0 holds placeholder zeros.
#[derive(Debug, Clone)]
pub struct MultiplicativeTables {
    limit: usize,
    pub mobius: Vec<i8>,
    pub phi: Vec<u64>,
    pub tau: Vec<u32>,
    pub vonmangoldt: Vec<f64>,
    primes: Vec<u64>,
}

impl MultiplicativeTables {
    pub fn new(limit: usize) -> Result<Self> {
        if limit < 1 {
            return domain("multiplicative tables need limit >= 1");
        }
        if limit > DEFAULT_TABLE_BUDGET {
            return capacity(format!(
                "table limit {limit} exceeds budget {DEFAULT_TABLE_BUDGET}"
            ));
        }
        let n = limit + 1;
        let mut mobius = vec![0i8; n];
        let mut phi = vec![0u64; n];
        let mut tau = vec![0u32; n];
        let mut vonmangoldt = vec![0f64; n];
        // exponent of the least prime factor, needed for tau
        let mut lp_exp = vec![0u32; n];
        let mut composite = vec![false; n];
        let mut primes: Vec<u64> = Vec::new();
        mobius[1] = 1;
        phi[1] = 1;
        tau[1] = 1;
        for i in 2..n {
            if !composite[i] {
                primes.push(i as u64);
                mobius[i] = -1;
                phi[i] = i as u64 - 1;
                tau[i] = 2;
                lp_exp[i] = 1;
            }
            for &p in &primes {
                let p = p as usize;
                let Some(m) = i.checked_mul(p) else { break };
                if m >= n {
                    break;
                }
                composite[m] = true;
                if i % p == 0 {
                    mobius[m] = 0;
                    phi[m] = phi[i] * p as u64;
                    lp_exp[m] = lp_exp[i] + 1;
                    tau[m] = tau[i] / (lp_exp[i] + 1) * (lp_exp[m] + 1);
                    break;
                }
                mobius[m] = -mobius[i];
                phi[m] = phi[i] * (p as u64 - 1);
                lp_exp[m] = 1;
                tau[m] = tau[i] * 2;
            }
        }
        for &p in &primes {
            let lg = (p as f64).ln();
            let mut pk = p;
            loop {
                vonmangoldt[pk as usize] = lg;
                match pk.checked_mul(p) {
                    Some(v) if v <= limit as u64 => pk = v,
                    _ => break,
                }
            }
        }
        Ok(Self {
            limit,
            mobius,
            phi,
            tau,
            vonmangoldt,
            primes,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Chebyshev `psi(x) = sum_{n <= x} Lambda(n)` by direct table sum.
    pub fn chebyshev_psi(&self, x: usize) -> f64 {
        let x = x.min(self.limit);
        super::ksum(&self.vonmangoldt[1..=x])
    }
}
