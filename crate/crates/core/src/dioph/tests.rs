use super::*;
use crate::numtheory::{dist_num, sieve_primes};
use proptest::prelude::*;

fn interval(d: i64) -> Vec<i64> {
    (1..=d).collect()
}

fn geometric_abs(d: i64, theta: f64) -> f64 {
    // |sum_{s=1}^{D} e(theta s)| / D = |sin(pi D theta) / sin(pi theta)| / D
    ((PI * d as f64 * theta).sin() / (PI * theta).sin()).abs() / d as f64
}

#[test]
fn exp_sum_trivial_and_geometric() {
    assert!((exp_sum(&[5, 9, 100], 0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    assert!((exp_sum(&[0], 0.377).unwrap().norm() - 1.0).abs() < 1e-15);
    for d in [999i64, 1000] {
        let v = exp_sum(&interval(d), 0.5).unwrap().norm();
        assert!(v <= 1.0 / d as f64 + 1e-12);
        for theta in [0.001, 0.0173, 0.31] {
            let v = exp_sum(&interval(d), theta).unwrap().norm();
            assert!((v - geometric_abs(d, theta)).abs() < 1e-12);
        }
    }
    assert!(exp_sum(&[], 0.1).is_err());
}

#[test]
fn spectrum_matches_direct_sums() {
    let s = vec![3i64, 17, 18, 40, 77, 101];
    let m = 256usize;
    let mut bins = vec![Complex64::default(); m];
    for &x in &s {
        bins[(x - 3) as usize % m] += 1.0 / s.len() as f64;
    }
    let spec = half_spectrum(bins);
    for (k, &a) in spec.iter().enumerate() {
        let direct = exp_sum(&s, k as f64 / m as f64).unwrap().norm();
        assert!((a - direct).abs() < 1e-12);
    }
}

#[test]
fn singleton_passes_with_q_one() {
    let p = DiophParams::new(1.0, 1.0, 1.0).unwrap();
    let r = dioph_verify(&[0], p, &[0.5, 1.0], ScanOptions::default()).unwrap();
    assert!(r.pass());
    assert_eq!(r.summary.flagged, r.summary.grid_size / 2 + 1);
    assert!(r.rows.iter().all(|row| row.q == 1));
}

#[test]
fn intervals_are_diophantine() {
    let p = |d: f64| DiophParams::new(2.0, 8.0, d).unwrap();
    for d in [100i64, 1000] {
        let r = dioph_verify(&interval(d), p(d as f64), &[0.05, 0.1, 0.2, 0.4], ScanOptions::default()).unwrap();
        assert!(r.pass(), "D = {d}: {:?}", r.summary);
        assert!(r.summary.margin <= 0.05 / 4.0 + 1e-15);
    }
}

#[test]
fn flags_agree_with_a_direct_scan() {
    // the certified grid misses no theta where the sum reaches delta
    let s = interval(100);
    let delta = 0.2;
    let r = dioph_verify(&s, DiophParams::new(2.0, 8.0, 100.0).unwrap(), &[delta], ScanOptions::default()).unwrap();
    let m = r.summary.grid_size as f64;
    let fine = 1 << 16;
    for i in 0..=fine / 2 {
        let theta = i as f64 / fine as f64;
        if geometric_abs(100, theta.max(1e-300)).min(1.0) >= delta {
            let k = (theta * m).round() as u64;
            assert!(r.rows.iter().any(|row| row.k == k), "theta = {theta} not flagged");
        }
    }
}

#[test]
fn capacity_error_names_a_floor() {
    let s: Vec<i64> = vec![0, 1 << 40];
    let err = dioph_verify(&s, DiophParams::new(2.0, 8.0, 1.0).unwrap(), &[0.1], ScanOptions::default()).unwrap_err();
    assert!(matches!(err, crate::LabError::Capacity(_)));
    assert!(err.to_string().contains("coarsest feasible level"));
}

fn family_scan(intervals: &[(u64, u64)], j: u32, l: f64) -> DiophReport {
    let fam = AlmostPrimeFamily::new(intervals, j).unwrap();
    let p = DiophParams::new(l, fam.k() as f64, fam.natural_scale()).unwrap();
    dioph_verify(&fam.elements_i64(), p, &[0.05, 0.1, 0.2, 0.4, 0.8], ScanOptions::default()).unwrap()
}

#[test]
fn desk_families_pass_at_empirical_exponent() {
    for j in [1u32, 2] {
        let probe = family_scan(&[(3, 8), (11, 30)], j, 1.0);
        let l = probe.summary.max_exponent_min.max(1.0) * (1.0 + 1e-9);
        let r = family_scan(&[(3, 8), (11, 30)], j, l);
        assert!(r.pass(), "j = {j}, L = {l}");
        assert!(l < 4.0, "j = {j}: empirical L = {l}");
    }
}

#[test]
fn gamma_of_primes_scales_like_inverse_loglog() {
    for x in [1_000u64, 10_000] {
        let primes = sieve_primes(x).unwrap().primes();
        let g = gamma_coprimality(&primes).unwrap();
        let scaled = g * (x as f64).ln().ln();
        assert!((0.1..=10.0).contains(&scaled), "X = {x}: {scaled}");
    }
}

proptest! {
    #[test]
    fn witness_consistent_with_obligation(num in 0u64..1_000_000, den in 1u64..1_000_000, scale in 1.0f64..1e6) {
        let num = num % den;
        let (q, v) = min_joint_obligation(num, den, scale);
        prop_assert!((q as f64).max(scale * (dist_num(q, num, den) as f64 / den as f64)) == v);
        // the minimizer's own error level already has a witness no larger than it
        let hit = smallest_within(num, den, dist_num(q, num, den) as f64 / den as f64);
        prop_assert!(hit.is_some_and(|(q2, _)| q2 <= q));
    }

    #[test]
    fn check_row_pass_matches_definition(k in 0u64..4096, l in 1.0f64..3.0, d in 1.0f64..1e5) {
        let m = 4096u64;
        let budget = 8f64.powf(l);
        let row = check_row(k, m, 1.0, 1.0, budget, d, 8f64.ln());
        let brute = (1..=budget.floor() as u64).any(|q| dist_num(q, k, m) as f64 / m as f64 <= budget / d);
        prop_assert_eq!(row.pass, brute);
        prop_assert_eq!(row.pass, row.exponent_min <= l * (1.0 + 1e-12));
    }
}
