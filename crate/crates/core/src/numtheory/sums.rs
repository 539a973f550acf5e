//! Compensated accumulation and exact phase reduction.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Neumaier-compensated running sum with a fixed left-to-right order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// `self - earlier` for two states of the same running sum, without
    /// first rounding either state to a single `f64`.
    #[inline]
    pub fn minus(&self, earlier: &KahanSum) -> f64 {
        (self.sum - earlier.sum) + (self.comp - earlier.comp)
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated complex sum (independent compensation per component).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexKahan {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    #[inline]
    pub fn minus(&self, earlier: &ComplexKahan) -> Complex64 {
        Complex64::new(self.re.minus(&earlier.re), self.im.minus(&earlier.im))
    }
}

impl FromIterator<Complex64> for ComplexKahan {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexKahan::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn ksum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<KahanSum>().value()
}

/// `H_m = sum_{n <= m} 1/n` for real `m >= 1` (so `H_m = H_{floor m}`).
pub fn harmonic(m: f64) -> f64 {
    if !(m >= 1.0) {
        return 0.0;
    }
    harmonic_int(m.floor() as u64)
}

/// `H_m` for integer `m`, with `H_0 = 0`.
pub fn harmonic_int(m: u64) -> f64 {
    let mut acc = KahanSum::new();
    for n in 1..=m {
        acc.add(1.0 / n as f64);
    }
    acc.value()
}

/// Prefix table `[H_0, H_1, ..., H_m]`, each entry compensated.
pub fn harmonic_table(m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(0.0);
    let mut acc = KahanSum::new();
    for n in 1..=m {
        acc.add(1.0 / n as f64);
        out.push(acc.value());
    }
    out
}

/// `sum 1/p` over the given primes.
pub fn mertens_sum(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| 1.0 / p as f64).collect::<KahanSum>().value()
}

/// Fractional part of `theta * n` in `[0, 1)`.
///
/// A finite `f64` is a dyadic rational `m / 2^s`, so the product is reduced
/// modulo 1 in 128-bit integer arithmetic; only the final conversion rounds.
pub fn frac_mul(theta: f64, n: i128) -> f64 {
    if n == 0 || theta == 0.0 || !theta.is_finite() {
        return 0.0;
    }
    let neg = (theta < 0.0) ^ (n < 0);
    let f = frac_mul_pos(theta.abs(), n.unsigned_abs());
    if neg && f != 0.0 {
        let g = 1.0 - f;
        if g >= 1.0 {
            0.0
        } else {
            g
        }
    } else {
        f
    }
}

fn frac_mul_pos(theta: f64, n: u128) -> f64 {
    let (mant, shift) = dyadic_parts(theta);
    if shift <= 0 {
        // theta is an integer
        return 0.0;
    }
    let shift = shift as u32;
    if shift >= 128 {
        let x = theta * n as f64;
        return x - x.floor();
    }
    // only the residue mod 2^shift matters, so wrapping is exact
    let prod = mant.wrapping_mul(n);
    let mask = (1u128 << shift) - 1;
    let r = prod & mask;
    let out = r as f64 / (2f64).powi(shift as i32);
    if out >= 1.0 {
        0.0
    } else {
        out
    }
}

/// Fractional part of `theta * n^m`, exact for the same reason as
/// [`frac_mul`]: `n^m` only matters modulo `2^128`.
pub fn frac_mul_pow(theta: f64, n: u64, m: u32) -> f64 {
    if theta == 0.0 || !theta.is_finite() {
        return 0.0;
    }
    let (_, shift) = dyadic_parts(theta.abs());
    if shift >= 128 {
        let x = theta * (n as f64).powi(m as i32);
        return x - x.floor();
    }
    let f = frac_mul_pos(theta.abs(), (n as u128).wrapping_pow(m));
    if theta < 0.0 && f != 0.0 {
        let g = 1.0 - f;
        if g >= 1.0 {
            0.0
        } else {
            g
        }
    } else {
        f
    }
}

/// Writes a positive finite `x` as `mant * 2^(-shift)` with `mant` odd.
pub(crate) fn dyadic_parts(x: f64) -> (u128, i32) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if exp_bits == 0 {
        (frac as u128, -1074)
    } else {
        ((frac | (1u64 << 52)) as u128, exp_bits - 1075)
    };
    if mant == 0 {
        return (0, 0);
    }
    while mant & 1 == 0 {
        mant >>= 1;
        exp += 1;
    }
    (mant, -exp)
}

/// Fractional part of `theta` as an exact `num / 2^s` with `s <= 62`;
/// finer dyadics are rounded to the nearest multiple of `2^-62`.
pub fn dyadic_fraction(theta: f64) -> (u64, u64) {
    let frac = frac_mul(theta, 1);
    if frac == 0.0 {
        return (0, 1);
    }
    let (mant, shift) = dyadic_parts(frac);
    if shift <= 62 {
        return (mant as u64, 1u64 << shift);
    }
    let den = 1u64 << 62;
    let num = (frac * den as f64).round() as u64;
    if num >= den {
        (0, 1)
    } else {
        (num, den)
    }
}

/// `e(x) = exp(2 pi i x)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `e(theta * n)` with the phase reduced exactly before the trigonometric call.
#[inline]
pub fn e_mul(theta: f64, n: i128) -> Complex64 {
    e(frac_mul(theta, n))
}

/// `||x||_{R/Z}`, distance to the nearest integer.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}
