//! Best rational approximation `min_{q <= qmax} ||q theta||`.

use super::sums::{dyadic_parts, frac_mul};
use serde::Serialize;

/// Direct-scan threshold: at or below it the minimizer is found by scanning.
pub const SCAN_LIMIT: u64 = 1_000_000;

/// `q <= cap` with `err = ||q theta||` and `a` the nearest integer to `q theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalApprox {
    pub q: u64,
    pub a: i64,
    pub err: f64,
}

/// The `q <= qmax` minimizing `||q theta||`, smallest `q` on ties.
///
/// Scans directly for `qmax <= SCAN_LIMIT`; above that uses the exact
/// continued fraction of the dyadic rational that `theta` is.
pub fn best_rational_approx(theta: f64, qmax: u64) -> RationalApprox {
    assert!(qmax >= 1, "best_rational_approx needs qmax >= 1");
    if qmax <= SCAN_LIMIT {
        scan_best(theta, qmax)
    } else {
        convergent_best(theta, qmax)
    }
}

fn approx_at(theta: f64, q: u64) -> RationalApprox {
    let f = frac_mul(theta, q as i128);
    let base = (theta * q as f64 - f).round() as i64;
    if f <= 0.5 {
        RationalApprox { q, a: base, err: f }
    } else {
        RationalApprox {
            q,
            a: base + 1,
            err: 1.0 - f,
        }
    }
}

/// Exhaustive scan over `q = 1..=qmax`.
pub fn scan_best(theta: f64, qmax: u64) -> RationalApprox {
    let mut best = approx_at(theta, 1);
    for q in 2..=qmax {
        let f = frac_mul(theta, q as i128);
        let err = f.min(1.0 - f);
        if err < best.err {
            best = approx_at(theta, q);
            if err == 0.0 {
                break;
            }
        }
    }
    best
}

fn convergent_best(theta: f64, qmax: u64) -> RationalApprox {
    let t = theta - theta.floor();
    if t == 0.0 {
        return approx_at(theta, 1);
    }
    let (mant, shift) = dyadic_parts(t);
    if shift >= 127 {
        // t < 2^-73: q = 1 already beats every rescaling
        return approx_at(theta, 1);
    }
    let den = 1u128 << shift;
    let mut best = approx_at(theta, 1);
    for q in convergent_denominators(mant, den) {
        if q > qmax as u128 {
            break;
        }
        let cand = approx_at(theta, q as u64);
        if cand.err < best.err {
            best = cand;
        }
    }
    best
}

/// Continued-fraction convergent denominators of `num / den` (`0 <= num < den`),
/// ascending, ending at the reduced denominator.
pub fn convergent_denominators(num: u128, den: u128) -> Vec<u128> {
    let mut out = vec![1u128];
    let (mut a, mut b) = (num % den, den);
    let (mut q_prev, mut q_cur) = (0u128, 1u128);
    // theta = a / b with 0 <= a < b; first partial quotient is 0
    while a != 0 {
        let k = b / a;
        let r = b % a;
        let Some(q_next) = k.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        q_prev = q_cur;
        q_cur = q_next;
        out.push(q_cur);
        b = a;
        a = r;
    }
    out.dedup();
    out
}

/// Exact `||q * num / den||` as the integer numerator over `den`.
#[inline]
pub fn dist_num(q: u64, num: u64, den: u64) -> u64 {
    let r = ((q as u128 * num as u128) % den as u128) as u64;
    r.min(den - r)
}

/// Best approximation of the rational `num / den` with `q <= qmax`:
/// returns `(q, ||q theta|| * den)` exactly, smallest `q` on ties.
pub fn best_exact(num: u64, den: u64, qmax: u64) -> (u64, u64) {
    assert!(den >= 1 && qmax >= 1);
    let num = num % den;
    let mut best = (1u64, dist_num(1, num, den));
    for q in convergent_denominators(num as u128, den as u128) {
        if q > qmax as u128 {
            break;
        }
        let q = q as u64;
        let d = dist_num(q, num, den);
        if d < best.1 {
            best = (q, d);
        }
    }
    best
}

/// `min_q max(q, scale * ||q theta||)` over all `q >= 1`, for `theta = num/den`.
///
/// For `q` between consecutive convergent denominators both terms dominate
/// those of the smaller convergent, so only convergents are visited.
/// Returns the minimizing `q` and the minimum value.
pub fn min_joint_obligation(num: u64, den: u64, scale: f64) -> (u64, f64) {
    let num = num % den;
    let mut best = (1u64, f64::INFINITY);
    for q in convergent_denominators(num as u128, den as u128) {
        let q = q as u64;
        let err = dist_num(q, num, den) as f64 / den as f64;
        let v = (q as f64).max(scale * err);
        if v < best.1 {
            best = (q, v);
        }
        if q as f64 >= best.1 {
            break;
        }
    }
    best
}

/// Smallest `q >= 1` with `||q num/den|| <= bound`, with its exact distance
/// numerator. The first such `q` beats every smaller denominator, so it is
/// a convergent denominator.
pub fn smallest_within(num: u64, den: u64, bound: f64) -> Option<(u64, u64)> {
    let num = num % den;
    convergent_denominators(num as u128, den as u128)
        .into_iter()
        .map(|q| (q as u64, dist_num(q as u64, num, den)))
        .find(|&(_, d)| d as f64 / den as f64 <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn brute(num: u64, den: u64, qmax: u64) -> (u64, u64) {
        let mut best = (1, dist_num(1, num, den));
        for q in 2..=qmax {
            let d = dist_num(q, num, den);
            if d < best.1 {
                best = (q, d);
            }
        }
        best
    }

    #[test]
    fn trivial_examples() {
        let r = best_rational_approx(1.0 / 3.0, 10);
        assert_eq!((r.q, r.a), (3, 1));
        assert!(r.err < 1e-15);
        let r = best_rational_approx(0.0, 5);
        assert_eq!((r.q, r.err), (1, 0.0));
    }

    #[test]
    fn pi_fraction_matches_exhaustive_scan() {
        let theta = PI - 3.0;
        let r = best_rational_approx(theta, 1000);
        // independent float loop as oracle
        let mut oracle = (1u64, f64::INFINITY);
        for q in 1..=1000u64 {
            let x = q as f64 * theta;
            let d = (x - x.round()).abs();
            if d < oracle.1 {
                oracle = (q, d);
            }
        }
        assert_eq!(r.q, oracle.0);
        assert!((r.err - oracle.1).abs() < 1e-12);
        assert_eq!(r.q, 113);
    }

    #[test]
    fn continued_fraction_route_agrees_with_scan() {
        for &theta in &[PI - 3.0, 0.618_033_988_749_894_9, 1e-7, 0.999_999_3, 0.5, 0.25] {
            for qmax in [1u64, 7, 1000, 50_000] {
                let a = scan_best(theta, qmax);
                let b = convergent_best(theta, qmax);
                assert_eq!(a.q, b.q, "theta={theta} qmax={qmax}");
                assert_eq!(a.err, b.err);
            }
        }
    }

    #[test]
    fn large_cap_uses_convergents() {
        let r = best_rational_approx(PI - 3.0, 10_000_000);
        assert!(r.q > 1_000_000 || r.err < 1e-9);
        let s = scan_best(PI - 3.0, 2_000_000);
        assert!(r.err <= s.err);
    }

    #[test]
    fn joint_obligation_small_cases() {
        // theta = 1/3 exactly: q = 3 gives max(3, 0) = 3
        assert_eq!(min_joint_obligation(1, 3, 1e6), (3, 3.0));
        // theta = 0: q = 1
        assert_eq!(min_joint_obligation(0, 7, 1e6).0, 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn exact_best_matches_brute_force(den in 1u64..5000, num_seed in any::<u64>(), qmax in 1u64..3000) {
            let num = num_seed % den;
            prop_assert_eq!(best_exact(num, den, qmax), brute(num, den, qmax));
        }

        #[test]
        fn float_best_matches_scan_for_random_theta(theta in 0.0f64..1.0, qmax in 1u64..10_000) {
            let a = scan_best(theta, qmax);
            let b = convergent_best(theta, qmax);
            prop_assert_eq!(a.q, b.q);
        }

        #[test]
        fn joint_obligation_matches_brute_force(den in 2u64..3000, num_seed in any::<u64>(), scale in 1.0f64..1e5) {
            let num = num_seed % den;
            let (_, v) = min_joint_obligation(num, den, scale);
            let brute_v = (1..=den)
                .map(|q| (q as f64).max(scale * dist_num(q, num, den) as f64 / den as f64))
                .fold(f64::INFINITY, f64::min);
            prop_assert!((v - brute_v).abs() <= 1e-9 * brute_v.max(1.0));
        }
    }

    proptest! {
        #[test]
        fn smallest_within_matches_scan(num in 0u64..5000, den in 1u64..5000, b in 0.0f64..0.5) {
            let num = num % den;
            let scan = (1..=den).find(|&q| dist_num(q, num, den) as f64 / den as f64 <= b);
            let got = smallest_within(num, den, b).map(|x| x.0);
            prop_assert_eq!(got, scan);
        }
    }
}
