use crate::error::{capacity, domain, Result};
use crate::numtheory::{divisors, euler_phi, sieve_primes, KahanSum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// The slack exponent `epsilon_0` in the window-width condition.
pub const EPS0: f64 = 0.1;

/// Largest family the generator will materialize.
pub const FAMILY_BUDGET: usize = 20_000_000;

/// Products `p_1^j ... p_k^j` with `p_l` ranging over the primes of the
/// half-open interval `I_l = [lo_l, hi_l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostPrimeFamily {
    pub intervals: Vec<(u64, u64)>,
    pub j: u32,
    /// Primes of each interval.
    pub primes: Vec<Vec<u64>>,
    /// Sorted elements.
    pub elements: Vec<u64>,
}

impl AlmostPrimeFamily {
    /// Intervals must be nonempty, in increasing order and separated
    /// (`max I_l < min I_{l+1}`), so factorizations are unique.
    pub fn new(intervals: &[(u64, u64)], j: u32) -> Result<Self> {
        if intervals.is_empty() {
            return domain("need at least one interval");
        }
        if j == 0 {
            return domain("power j must be positive");
        }
        for (i, &(lo, hi)) in intervals.iter().enumerate() {
            if lo < 2 || hi <= lo {
                return domain(format!("interval {i} = [{lo}, {hi}) must satisfy 2 <= lo < hi"));
            }
            if i > 0 && intervals[i - 1].1 > lo {
                return domain(format!("intervals {} and {i} overlap or are out of order", i - 1));
            }
        }
        let top = intervals.last().unwrap().1;
        let table = sieve_primes(top)?;
        let mut primes = Vec::with_capacity(intervals.len());
        let mut size = 1usize;
        for (i, &(lo, hi)) in intervals.iter().enumerate() {
            let ps = table.primes_in(lo, hi)?;
            if ps.is_empty() {
                return domain(format!("interval {i} = [{lo}, {hi}) contains no prime"));
            }
            size = size.saturating_mul(ps.len());
            primes.push(ps);
        }
        if size > FAMILY_BUDGET {
            return capacity(format!("family has {size} elements, budget is {FAMILY_BUDGET}"));
        }
        let mut elements = vec![1u64];
        for ps in &primes {
            let mut next = Vec::with_capacity(elements.len() * ps.len());
            for &x in &elements {
                for &p in ps {
                    let pj = p.checked_pow(j);
                    match pj.and_then(|v| v.checked_mul(x)).filter(|&v| v <= i64::MAX as u64) {
                        Some(v) => next.push(v),
                        None => return capacity("family element overflows 63 bits"),
                    }
                }
            }
            elements = next;
        }
        elements.sort_unstable();
        Ok(Self {
            intervals: intervals.to_vec(),
            j,
            primes,
            elements,
        })
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    /// `(prod_l min I_l)^j`, the scale `D` at which the family is expected
    /// to be diophantine with `L' = k`.
    pub fn natural_scale(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, _)| (lo as f64).powi(self.j as i32))
            .product()
    }

    pub fn elements_i64(&self) -> Vec<i64> {
        self.elements.iter().map(|&x| x as i64).collect()
    }

    /// `log log max(I_l) - log log min(I_l)` per window.
    pub fn loglog_widths(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| ((hi - 1) as f64).ln().ln() - (lo as f64).ln().ln())
            .collect()
    }
}

fn normalized_weights(m: &[u64]) -> Result<Vec<(u64, f64)>> {
    let mut v = m.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return domain("gamma of an empty set");
    }
    if v[0] == 0 {
        return domain("elements must be positive");
    }
    let mass: KahanSum = v.iter().map(|&n| 1.0 / n as f64).collect();
    let mass = mass.value();
    Ok(v.into_iter().map(|n| (n, (1.0 / n as f64) / mass)).collect())
}

/// `gamma(M) = E^log_{n,n' in M} gcd(n, n') - 1`.
///
/// Uses `gcd(n, n') = sum_{d | n, d | n'} phi(d)`, so the pair sum is
/// `sum_d phi(d) W_d^2` with `W_d` the weight of the multiples of `d` in `M`.
pub fn gamma_coprimality(m: &[u64]) -> Result<f64> {
    let w = normalized_weights(m)?;
    let mut wd: BTreeMap<u64, KahanSum> = BTreeMap::new();
    for &(n, wn) in &w {
        for d in divisors(n) {
            wd.entry(d).or_default().add(wn);
        }
    }
    let mut acc = KahanSum::new();
    for (d, s) in wd {
        if d > 1 {
            let v = s.value();
            acc.add((euler_phi(d) as f64) * v * v);
        }
    }
    // the d = 1 term is (sum w)^2 = 1, which cancels the -1
    Ok(acc.value().max(0.0))
}

/// `gamma(M)` as an exact rational.
pub fn gamma_exact(m: &[u64]) -> Result<BigRational> {
    let mut v = m.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() || v[0] == 0 {
        return domain("gamma needs a nonempty set of positive integers");
    }
    let mass: BigRational = v.iter().map(|&n| BigRational::new(BigInt::one(), n.into())).sum();
    let mut wd: BTreeMap<u64, BigRational> = BTreeMap::new();
    for &n in &v {
        for d in divisors(n) {
            *wd.entry(d).or_insert_with(BigRational::zero) += BigRational::new(BigInt::one(), n.into());
        }
    }
    let mut total = BigRational::zero();
    for (d, s) in wd {
        total += BigRational::from_integer(euler_phi(d).into()) * &s * &s;
    }
    Ok(total / (&mass * &mass) - BigRational::one())
}

/// Coprimality of a family against `gamma <= delta^(4 + eps0/2)`, with
/// `delta` the level its window widths support:
/// `min_l (log log max I_l - log log min I_l) = k delta^(-4 - eps0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoprimalityCheck {
    pub gamma: f64,
    /// `prod_l (1 + gamma(P_l)) - 1`, which equals `gamma` for a family.
    pub gamma_product: f64,
    pub window_gammas: Vec<f64>,
    pub delta: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Requires `j = 1` (the family is a set of almost primes).
pub fn coprimality_check(family: &AlmostPrimeFamily) -> Result<CoprimalityCheck> {
    if family.j != 1 {
        return domain("coprimality is defined for j = 1 families");
    }
    let gamma = gamma_coprimality(&family.elements)?;
    let window_gammas = family
        .primes
        .iter()
        .map(|ps| gamma_coprimality(ps))
        .collect::<Result<Vec<_>>>()?;
    let gamma_product = window_gammas.iter().map(|g| 1.0 + g).product::<f64>() - 1.0;
    let width = family.loglog_widths().into_iter().fold(f64::INFINITY, f64::min);
    if !(width > 0.0) {
        return domain("every window must have positive log log width");
    }
    let k = family.k() as f64;
    let delta = (k / width).powf(1.0 / (4.0 + EPS0));
    let bound = delta.powf(4.0 + EPS0 / 2.0);
    Ok(CoprimalityCheck {
        gamma,
        gamma_product,
        window_gammas,
        delta,
        bound,
        pass: gamma <= bound,
    })
}
