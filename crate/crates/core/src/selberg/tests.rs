use super::*;
use crate::numtheory::{ramanujan_sum, sieve_primes, tau};
use proptest::prelude::*;

fn direct(r: f64, z: f64, n: u64) -> f64 {
    // independent path: Kluyver sums and trial-division mu, phi
    let s: f64 = (1..=r.floor() as u64)
        .map(|q| mobius(q) as f64 / euler_phi(q) as f64 * ramanujan_sum(q, n as i64) as f64)
        .sum();
    s * s / z
}

#[test]
fn degenerate_level() {
    assert!(SelbergSieve::new(2.9, Normalizer::MuSquared).is_err());
    assert!(SelbergSieve::new(400.0, Normalizer::MuSquared).is_err());
    // sum_{q <= 3} mu/phi = 1 - 1 - 1/2 != 0, but R = 2 would vanish
    assert!(SelbergSieve::new(3.0, Normalizer::Mu).is_ok());
}

#[test]
fn primes_beyond_level_squared() {
    let s = SelbergSieve::new(10.0, Normalizer::MuSquared).unwrap();
    let z: f64 = (1..=10u64).filter(|&q| is_squarefree(q)).map(|q| 1.0 / euler_phi(q) as f64).sum();
    assert!((s.normalizer - z).abs() < 1e-14);
    for p in sieve_primes(3000).unwrap().primes_in(101, 3000).unwrap() {
        assert!((s.value(p) - z).abs() < 1e-12 * z);
    }
}

#[test]
fn matches_direct_formula() {
    for kind in [Normalizer::MuSquared, Normalizer::Mu] {
        let s = SelbergSieve::new(17.0, kind).unwrap();
        for a in 0..20 {
            let n = 1u64 << a;
            assert!((s.value(n) - direct(17.0, s.normalizer, n)).abs() < 1e-10);
        }
        for n in [1u64, 30, 210, 2310, 99_991, 100_000] {
            assert!((s.value(n) - direct(17.0, s.normalizer, n)).abs() < 1e-10);
        }
    }
}

#[test]
fn level_three_linear_system() {
    let s = SelbergSieve::new(3.0, Normalizer::MuSquared).unwrap();
    let c = s.expand();
    assert_eq!(c.c.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 6]);
    // rows n = 0, 1, 2, 3 mod 6; columns q = 1, 2, 3, 6
    let qs = [1u64, 2, 3, 6];
    let mut a: Vec<Vec<f64>> = (0..4u64)
        .map(|n| {
            let mut row: Vec<f64> = qs.iter().map(|&q| ramanujan_sum(q, n as i64) as f64).collect();
            row.push(s.value(n + 6));
            row
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..5 {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    for (i, q) in qs.iter().enumerate() {
        let solved = a[i][4] / a[i][i];
        assert!((solved - c.c[q]).abs() < 1e-12, "q = {q}");
    }
    // coprime cross term 2 * a_2 * a_3 / Z, with no square contribution at q = 6
    let z = s.normalizer;
    assert!((c.c[&6] - 2.0 * (-1.0) * (-0.5) / z).abs() < 1e-14);
}

#[test]
fn constant_term_is_period_mean() {
    let s = SelbergSieve::new(3.0, Normalizer::MuSquared).unwrap();
    let c = s.expand();
    let period = 2 * 3 * 5 * 7u64;
    let mean: f64 = (1..=period).map(|n| s.value(n)).sum::<f64>() / period as f64;
    assert!((mean - c.c[&1]).abs() < 1e-12);
}

#[test]
fn reconstruction_and_envelope() {
    let s = SelbergSieve::new(100_000f64.powf(0.25), Normalizer::MuSquared).unwrap();
    let c = s.expand();
    assert!(c.c.keys().all(|&q| is_squarefree(q) && q as f64 <= s.r * s.r));
    let mut rng = crate::averages::suite_rng(1, 0);
    for _ in 0..1000 {
        let n: u64 = rand::Rng::gen_range(&mut rng, 100_000..200_000);
        let v = s.value(n);
        assert!((c.eval(n) - v).abs() <= 1e-8 * v.abs().max(1.0));
    }
    for (&q, &v) in &c.c {
        let t = tau(q) as f64;
        assert!(v.abs() <= 10.0 * t * t / q as f64, "q = {q}");
    }
}

#[test]
fn total_absorption() {
    // 2^i0 = 16 >= R^2 = 9 needs Q = 16 <= log X
    let d = band_decompose(8_900_000, 3.0, 16, 0.125, 4.0, Normalizer::MuSquared).unwrap();
    assert!(d.bands.is_empty());
    assert!(d.h.iter().all(|&v| v == 0.0));
    assert!(d.telescoping_error() < 1e-12);
}

#[test]
fn q_two_uses_two_moduli() {
    let d = band_decompose(1000, 5.0, 2, 0.125, 4.0, Normalizer::MuSquared).unwrap();
    assert_eq!(d.i0, 1);
    assert_eq!(d.period, 2);
    // Lambda_per(n) = c_1 + c_2 (-1)^n
    let (c1, c2) = (d.coefficients.c[&1], d.coefficients.c[&2]);
    for (k, &v) in d.lam_per.iter().enumerate() {
        let n = 1000 + k as u64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((v - (c1 + sign * c2)).abs() < 1e-12);
    }
    assert!(d.telescoping_error() < 1e-8);
}

#[test]
fn band_thresholds_hold() {
    let d = band_decompose(10_000, 10.0, 4, 0.125, 4.0, Normalizer::MuSquared).unwrap();
    for b in &d.bands {
        assert!(b.g.iter().all(|v| v.abs() <= b.threshold));
        assert!(b.gprime.iter().all(|&v| v == 0.0 || v.abs() > b.threshold));
    }
    assert!(d.telescoping_error() < 1e-8);
    let rep = verify_sieve_bounds(&d).unwrap();
    assert!(rep.majorant_min >= 0.0);
    assert!(rep.min_prime_over_log_r >= 0.8);
}

#[test]
fn fourier_sup_matches_direct_scan() {
    let d = band_decompose(2000, 10.0, 2, 0.5, 4.0, Normalizer::MuSquared).unwrap();
    let rep = verify_sieve_bounds(&d).unwrap();
    let b = &d.bands[0];
    let st = &rep.bands[0];
    let mut best = 0.0f64;
    for k in 0..=20_000 {
        let theta = k as f64 / 40_000.0;
        let z: num_complex::Complex64 = b
            .g
            .iter()
            .enumerate()
            .map(|(i, &v)| crate::numtheory::e_mul(theta, i as i128) * v)
            .sum();
        best = best.max(z.norm());
    }
    assert!(best <= st.g_hat_sup + 1e-9);
    assert!(st.g_hat_grid <= st.g_hat_sup);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn majorant_nonnegative(r in 3.0f64..40.0, n in 1u64..10_000_000) {
        prop_assert!(SelbergSieve::new(r, Normalizer::MuSquared).unwrap().value(n) >= 0.0);
    }
}
