use super::*;
use crate::numtheory::{e, e_mul};
use proptest::prelude::*;
use std::f64::consts::PI;

fn one(lo: i64, hi: i64) -> SampledFunction {
    SampledFunction::constant(lo, hi, Complex64::new(1.0, 0.0)).unwrap()
}

fn direct_projection(f: &SampledFunction, q: i64, h: i64, n: i64) -> Complex64 {
    let mut s = Complex64::default();
    for a in 1..=h {
        for b in 1..=h {
            s += f.get(n + q * (a - b)).unwrap();
        }
    }
    s / (h * h) as f64
}

#[test]
fn u1log_trivial_values() {
    let p = NormParams::new(5000, 7, 20).unwrap();
    assert!((u1log_norm(&one(1, 6000), p).unwrap() - 1.0).abs() < 1e-12);
    let per = SampledFunction::from_fn(1, 6000, 1.0, |n| e(n as f64 / 7.0)).unwrap();
    assert!((u1log_norm(&per, p).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(u1log_norm(&one(1, 5000), p), Err(crate::LabError::Range(_))));
}

#[test]
fn u1log_of_linear_phase_is_fejer_value() {
    for (alpha, q, h) in [(0.013, 3u64, 10u64), (0.2371, 5, 40), (1e-4, 11, 200)] {
        let p = NormParams::new(4000, q, h).unwrap();
        let f = SampledFunction::from_fn(1, 4000 + (q * h) as i64, 1.0, |n| e_mul(alpha, n as i128)).unwrap();
        let x = PI * alpha * q as f64;
        let closed = ((h as f64 * x).sin() / (h as f64 * x.sin())).abs();
        assert!((u1log_norm(&f, p).unwrap() - closed).abs() < 1e-10, "alpha={alpha}");
        assert!((u1_norm(&f, p).unwrap() - closed).abs() < 1e-10);
    }
}

#[test]
fn u1_trivial_and_naive() {
    let p = NormParams::new(1000, 4, 9).unwrap();
    let alt = SampledFunction::from_fn(1, 1100, 1.0, |n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).unwrap();
    assert!((u1_norm(&alt, p).unwrap() - 1.0).abs() < 1e-12);
    assert!((u1_norm(&one(1, 1100), p).unwrap() - 1.0).abs() < 1e-12);
    let p = NormParams::new(2000, 3, 17).unwrap();
    let f = SampledFunction::random_disc(1, 2100, 21, 0).unwrap();
    let mut acc = 0.0;
    for n in 1..=2000i64 {
        let mut s = Complex64::default();
        for h in 1..=17 {
            s += f.get(n + 3 * h).unwrap();
        }
        acc += (s / 17.0).norm_sqr();
    }
    let naive = (acc / 2000.0).sqrt();
    assert!((u1_norm(&f, p).unwrap() - naive).abs() < 1e-12);
}

#[test]
fn projection_trivial_cases() {
    let c = Complex64::new(0.3, -0.4);
    let f = SampledFunction::constant(-500, 3000, c).unwrap();
    let p = project(&f, 3, 50).unwrap();
    assert_eq!((p.lo(), p.hi()), (-500 + 147, 3000 - 147));
    assert!(p.values().iter().all(|v| (v - c).norm() < 1e-12));
    let per = SampledFunction::from_fn(0, 4000, 1.0, |n| e((n.rem_euclid(6)) as f64 * 0.17)).unwrap();
    let p = project(&per, 6, 30).unwrap();
    for n in p.lo()..=p.hi() {
        assert!((p.get(n).unwrap() - per.get(n).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn projection_matches_double_loop_at_random_spots() {
    use rand::Rng;
    let f = SampledFunction::random_disc(-1000, 20_000, 5, 0).unwrap();
    let p = project(&f, 3, 50).unwrap();
    let mut rng = crate::averages::suite_rng(99, 0);
    for _ in 0..100 {
        let n = rng.gen_range(p.lo()..=p.hi());
        assert!((p.get(n).unwrap() - direct_projection(&f, 3, 50, n)).norm() < 1e-10);
    }
    assert!(project(&f, 1000, 50).is_err());
}

#[test]
fn almost_period_cases() {
    let f = SampledFunction::random_disc(1, 5000, 8, 0).unwrap();
    assert_eq!(almost_period_defect(&f, 3, 20, 0).unwrap().lhs, 0.0);
    assert!(almost_period_defect(&one(1, 5000), 3, 20, 4).unwrap().lhs < 1e-12);
    for h in [-7i64, 1, 5, 19] {
        let r = almost_period_defect(&f, 3, 20, h).unwrap();
        assert!(r.ratio <= 1.0 + 1e-9, "{r:?}");
    }
}

#[test]
fn proj_check_cases() {
    let f = SampledFunction::random_disc(-200, 6000, 9, 0).unwrap();
    assert!(proj_check_defect(&f, 3, 1, 1, 5000).unwrap().lhs < 1e-15);
    assert!(proj_check_defect(&one(-200, 6000), 3, 10, 40, 5000).unwrap().lhs < 1e-12);
    let r = proj_check_defect(&f, 3, 10, 40, 5000).unwrap();
    assert!(r.ratio <= 1.0);
    assert!(proj_check_defect(&f, 3, 41, 40, 5000).is_err());
}

#[test]
fn pythagoras_cases() {
    let f = one(-2000, 8000);
    let r = pythagoras_defect(&f, 2, 6, 30, 10, 5000).unwrap();
    assert_eq!(r.param("pass"), Some(1.0));
    let g = SampledFunction::random_disc(-2000, 8000, 10, 0).unwrap();
    let r = pythagoras_defect(&g, 3, 3, 20, 20, 5000).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert_eq!(r.param("pass"), Some(1.0));
    assert!(pythagoras_defect(&g, 3, 4, 20, 10, 5000).is_err());
}

#[test]
fn maximal_cases() {
    let f = one(-500, 5000);
    let r = maximal_lower(&f, &f, 3, 20, 4000).unwrap();
    assert!((r.base - 1.0).abs() < 1e-12 && (r.projected - 1.0).abs() < 1e-12);
    assert!(r.maximal_pass && r.avg_max_pass);
    let ind = SampledFunction::from_fn(-500, 5000, 1.0, |n| Complex64::new((n % 4 == 0) as u8 as f64, 0.0)).unwrap();
    let r = maximal_lower(&ind, &ind, 4, 20, 4000).unwrap();
    assert!(r.projected >= r.base * r.base / 8.0);
    assert!((r.projected - r.base).abs() < 1e-12);
    let neg = SampledFunction::from_real(-500, &vec![-0.5; 5501]).unwrap();
    assert!(maximal_lower(&neg, &f, 3, 20, 4000).is_err());
}

#[test]
fn norm_compare_cases() {
    let r = norm_compare_defect(&one(1, 5000), 2, 6, 40, 10, 4000).unwrap();
    assert_eq!(r.param("pass"), Some(1.0));
    let per = SampledFunction::from_fn(1, 5000, 1.0, |n| e((n % 6) as f64 / 5.0)).unwrap();
    let r = norm_compare_defect(&per, 2, 6, 40, 10, 4000).unwrap();
    assert_eq!(r.param("pass"), Some(1.0));
    assert!(norm_compare_defect(&per, 2, 5, 40, 10, 4000).is_err());
    assert!(norm_compare_defect(&per, 2, 6, 40, 20, 4000).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_never_increases_sup_norm(seed in any::<u64>(), q in 1u64..6, h in 1u64..30) {
        let f = SampledFunction::random_disc(1, 1500, seed, 0).unwrap();
        let p = project(&f, q, h).unwrap();
        let sup_f = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let sup_p = p.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(sup_p <= sup_f + 1e-12);
    }

    #[test]
    fn norm_within_bound(seed in any::<u64>(), q in 1u64..8, h in 1u64..40) {
        let f = SampledFunction::random_disc(1, 1000 + (q * h) as i64, seed, 1).unwrap();
        let p = NormParams::new(1000, q, h).unwrap();
        prop_assert!(u1log_norm(&f, p).unwrap() <= f.bound() + 1e-12);
    }
}
