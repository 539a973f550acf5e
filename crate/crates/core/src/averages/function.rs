use crate::error::{domain, range, Result};
use crate::numtheory::ComplexKahan;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::atomic::{AtomicU64, Ordering};

/// Slack allowed between a sample's modulus and the declared bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// A complex-valued function sampled on the integer range `[lo, hi]`.
///
/// Reads outside the range return 0 and bump a counter, since the functions
/// of interest live on all of `N` and truncation has to stay visible.
#[derive(Debug)]
pub struct SampledFunction {
    lo: i64,
    values: Vec<Complex64>,
    bound: f64,
    range_events: AtomicU64,
}

impl Clone for SampledFunction {
    fn clone(&self) -> Self {
        Self {
            lo: self.lo,
            values: self.values.clone(),
            bound: self.bound,
            range_events: AtomicU64::new(self.range_events()),
        }
    }
}

impl SampledFunction {
    /// Values for `lo, lo + 1, ...`; fails if some `|value| > bound`.
    pub fn new(lo: i64, values: Vec<Complex64>, bound: f64) -> Result<Self> {
        if values.is_empty() {
            return domain("sampled function needs at least one value");
        }
        if !(bound >= 0.0) {
            return domain(format!("bound must be nonnegative, got {bound}"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() <= bound + BOUND_SLACK))
        {
            return domain(format!(
                "value {v} at n = {} exceeds declared bound {bound}",
                lo + i as i64
            ));
        }
        Ok(Self {
            lo,
            values,
            bound,
            range_events: AtomicU64::new(0),
        })
    }

    /// 1-bounded real values; convenience for indicator-like functions.
    pub fn from_real(lo: i64, values: &[f64]) -> Result<Self> {
        Self::new(lo, values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), 1.0)
    }

    pub fn from_fn(lo: i64, hi: i64, bound: f64, f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        if hi < lo {
            return domain(format!("empty range [{lo}, {hi}]"));
        }
        Self::new(lo, (lo..=hi).map(f).collect(), bound)
    }

    pub fn constant(lo: i64, hi: i64, c: Complex64) -> Result<Self> {
        Self::from_fn(lo, hi, c.norm(), |_| c)
    }

    /// Independent uniform draws from the closed unit disc.
    ///
    /// The generator is ChaCha8 seeded with `seed` via `seed_from_u64`,
    /// stream `stream`; each value consumes two `f64` draws `(u, v)` and is
    /// `sqrt(u) * e(v)`.
    pub fn random_disc(lo: i64, hi: i64, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = suite_rng(seed, stream);
        Self::from_fn(lo, hi, 1.0, |_| {
            let u: f64 = rng_f64(&mut rng);
            let v: f64 = rng_f64(&mut rng);
            let (s, c) = (TAU * v).sin_cos();
            Complex64::new(c, s) * u.sqrt()
        })
    }

    /// Independent uniform draws from `[0, 1]` (real, nonnegative).
    pub fn random_unit_interval(lo: i64, hi: i64, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = suite_rng(seed, stream);
        Self::from_fn(lo, hi, 1.0, |_| Complex64::new(rng_f64(&mut rng), 0.0))
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.lo && hi <= self.hi()
    }

    pub fn require_cover(&self, lo: i64, hi: i64, what: &str) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            range(format!(
                "{what} needs f on [{lo}, {hi}], but f is sampled on [{}, {}]",
                self.lo,
                self.hi()
            ))
        }
    }

    /// `f(n)`, or 0 (counted) outside the sampled range.
    #[inline]
    pub fn eval(&self, n: i64) -> Complex64 {
        match self.get(n) {
            Some(v) => v,
            None => {
                self.range_events.fetch_add(1, Ordering::Relaxed);
                Complex64::new(0.0, 0.0)
            }
        }
    }

    #[inline]
    pub fn get(&self, n: i64) -> Option<Complex64> {
        let i = n.checked_sub(self.lo)?;
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    /// Out-of-range reads so far.
    pub fn range_events(&self) -> u64 {
        self.range_events.load(Ordering::Relaxed)
    }

    pub fn reset_range_events(&self) {
        self.range_events.store(0, Ordering::Relaxed);
    }

    /// True when every sample is real and `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }

    /// `a f + b g` on the intersection of the two ranges.
    pub fn combine(a: Complex64, f: &Self, b: Complex64, g: &Self) -> Result<Self> {
        let lo = f.lo.max(g.lo);
        let hi = f.hi().min(g.hi());
        if hi < lo {
            return domain("linear combination of functions with disjoint ranges");
        }
        let bound = a.norm() * f.bound + b.norm() * g.bound;
        Self::from_fn(lo, hi, bound, |n| {
            a * f.get(n).unwrap_or_default() + b * g.get(n).unwrap_or_default()
        })
    }

    /// Difference operator `x -> f(x + h) conj(f(x + h'))`, on every `x`
    /// where both shifts stay in range.
    pub fn difference(&self, h: i64, h2: i64) -> Result<Self> {
        let lo = self.lo - h.min(h2);
        let hi = self.hi() - h.max(h2);
        if hi < lo {
            return range(format!("difference ({h}, {h2}) leaves no valid points"));
        }
        Self::from_fn(lo, hi, self.bound * self.bound, |x| {
            self.get(x + h).unwrap_or_default() * self.get(x + h2).unwrap_or_default().conj()
        })
    }
}

/// The generator behind every seeded suite draw.
pub fn suite_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
pub(crate) fn rng_f64(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen::<f64>()
}

/// Sums `sum_{h=1}^{len} f(x + h * step)` in O(1) per query after one
/// compensated prefix pass along each residue class mod `step`.
pub struct ProgressionSums {
    lo: i64,
    step: i64,
    len: i64,
    prefix: Vec<ComplexKahan>,
}

impl ProgressionSums {
    pub fn new(f: &SampledFunction, step: u64, len: u64) -> Self {
        assert!(step >= 1);
        let s = step as usize;
        let vals = f.values();
        let mut prefix: Vec<ComplexKahan> = Vec::with_capacity(vals.len());
        for (i, &v) in vals.iter().enumerate() {
            let mut acc = if i >= s { prefix[i - s] } else { ComplexKahan::new() };
            acc.add(v);
            prefix.push(acc);
        }
        Self {
            lo: f.lo(),
            step: step as i64,
            len: len as i64,
            prefix,
        }
    }

    #[inline]
    fn prefix_at(&self, x: i64) -> ComplexKahan {
        let i = x - self.lo;
        if i < 0 {
            return ComplexKahan::new();
        }
        let last = self.prefix.len() as i64 - 1;
        let j = if i <= last {
            i
        } else {
            // past the end: back to the last sample of the same class
            i - (i - last + self.step - 1) / self.step * self.step
        };
        if j < 0 {
            ComplexKahan::new()
        } else {
            self.prefix[j as usize]
        }
    }

    /// `sum_{h=1}^{len} f(x + h step)`; out-of-range terms count as 0.
    #[inline]
    pub fn sum(&self, x: i64) -> Complex64 {
        self.prefix_at(x + self.len * self.step).minus(&self.prefix_at(x))
    }

    /// `E_{h in [len]} f(x + h step)`.
    #[inline]
    pub fn mean(&self, x: i64) -> Complex64 {
        self.sum(x) / self.len as f64
    }
}
