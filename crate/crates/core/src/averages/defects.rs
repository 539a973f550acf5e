use super::{check_n, log_mean_by, mean_by, AvgMode, DefectRecord, ProgressionSums, SampledFunction};
use crate::error::{domain, Result};
use crate::numtheory::{mertens_sum, KahanSum};
use num_complex::Complex64;
use num_integer::Integer;

fn events_param(f: &SampledFunction, before: u64) -> (String, f64) {
    ("range_events".into(), (f.range_events() - before) as f64)
}

fn ln_n(n: u64) -> Result<f64> {
    if n < 2 {
        return domain("defect bounds divide by log N, so N must be at least 2");
    }
    Ok((n as f64).ln())
}

/// `|E f(n) - E f(n + h)|` against `(1 + log|h|)/log N` (log mode) or
/// `|h|/N` (uniform mode).
pub fn shift_defect(f: &SampledFunction, n: u64, h: i64, mode: AvgMode) -> Result<DefectRecord> {
    check_n(n)?;
    if h == 0 {
        return domain("shift h must be nonzero");
    }
    if h.unsigned_abs() >= n {
        return domain(format!("shift |h| = {} must be below N = {n}", h.unsigned_abs()));
    }
    let log_n = ln_n(n)?;
    let before = f.range_events();
    let a = mean_by(mode, n, |m| f.eval(m));
    let b = mean_by(mode, n, |m| f.eval(m + h));
    let habs = h.unsigned_abs() as f64;
    let bound = match mode {
        AvgMode::Log => (1.0 + habs.ln()) / log_n,
        AvgMode::Uniform => habs / n as f64,
    };
    Ok(DefectRecord::new(
        (a - b).norm(),
        bound,
        vec![
            ("h".into(), h as f64),
            ("log_mode".into(), (mode == AvgMode::Log) as u8 as f64),
            events_param(f, before),
        ],
    ))
}

/// `|E_{a<q} E^log f(qn + a) - E^log f(n)|` against `(1 + log q)/log N`.
pub fn residue_split_defect(f: &SampledFunction, n: u64, q: u64) -> Result<DefectRecord> {
    check_n(n)?;
    if q == 0 {
        return domain("modulus q must be positive");
    }
    let log_n = ln_n(n)?;
    let before = f.range_events();
    let base = log_mean_by(n, |m| f.eval(m));
    let qi = q as i64;
    let split = if q == 1 {
        base
    } else {
        // one pass: sum_a f(qm + a) for every m, then log-average
        log_mean_by(n, |m| {
            let mut s = Complex64::default();
            for a in 0..qi {
                s += f.eval(qi * m + a);
            }
            s / q as f64
        })
    };
    Ok(DefectRecord::new(
        (split - base).norm(),
        (1.0 + (q as f64).ln()) / log_n,
        vec![("q".into(), q as f64), events_param(f, before)],
    ))
}

/// `|E^log_n E_{h in [H]} f(qn + bh) - E^log f(n)|` against
/// `(1 + log q + log bH)/log N + q/H`.
pub fn frobenius_defect(f: &SampledFunction, n: u64, q: u64, b: u64, hh: u64) -> Result<DefectRecord> {
    check_n(n)?;
    if q == 0 || b == 0 || hh == 0 {
        return domain("q, b and H must be positive");
    }
    if q.gcd(&b) != 1 {
        return domain(format!("q = {q} and b = {b} are not coprime"));
    }
    let log_n = ln_n(n)?;
    let before = f.range_events();
    let base = log_mean_by(n, |m| f.eval(m));
    let (qi, bi, hi) = (q as i64, b as i64, hh as i64);
    let lo_needed = qi + bi;
    let hi_needed = qi * n as i64 + bi * hi;
    let avg = if f.covers(lo_needed, hi_needed) {
        let ps = ProgressionSums::new(f, b, hh);
        log_mean_by(n, |m| ps.mean(qi * m))
    } else {
        log_mean_by(n, |m| {
            let mut s = Complex64::default();
            for h in 1..=hi {
                s += f.eval(qi * m + bi * h);
            }
            s / hh as f64
        })
    };
    let bound = (1.0 + (q as f64).ln() + ((b * hh) as f64).ln()) / log_n + q as f64 / hh as f64;
    Ok(DefectRecord::new(
        (avg - base).norm(),
        bound,
        vec![
            ("q".into(), q as f64),
            ("b".into(), b as f64),
            ("H".into(), hh as f64),
            events_param(f, before),
        ],
    ))
}

/// `|E^log (f(n) - q 1_{q|n} f(n/q))|` against `log q/log N`
/// (`1/log N` when `q = 1`).
pub fn dilate_defect(f: &SampledFunction, n: u64, q: u64) -> Result<DefectRecord> {
    check_n(n)?;
    if q == 0 {
        return domain("dilation q must be positive");
    }
    let log_n = ln_n(n)?;
    let before = f.range_events();
    let qi = q as i64;
    let qf = q as f64;
    let v = log_mean_by(n, |m| {
        if m % qi == 0 {
            f.eval(m) - f.eval(m / qi) * qf
        } else {
            f.eval(m)
        }
    });
    let bound = if q == 1 { 1.0 / log_n } else { qf.ln() / log_n };
    Ok(DefectRecord::new(
        v.norm(),
        bound,
        vec![("q".into(), qf), events_param(f, before)],
    ))
}

/// `|E^log f(n) - E^log_{n, p} f(pn)|` with primes weighted by `1/p`,
/// against `log P/log N + (sum 1/p)^(-1/2)`.
pub fn elliott_defect(f: &SampledFunction, n: u64, primes: &[u64], p_max: u64) -> Result<DefectRecord> {
    check_n(n)?;
    if primes.is_empty() {
        return domain("prime set must be nonempty");
    }
    if let Some(&p) = primes.iter().find(|&&p| p > p_max || p < 2) {
        return domain(format!("prime {p} outside [2, P = {p_max}]"));
    }
    if p_max > n {
        return domain(format!("P = {p_max} exceeds N = {n}"));
    }
    let log_n = ln_n(n)?;
    let before = f.range_events();
    let base = log_mean_by(n, |m| f.eval(m));
    let mass = mertens_sum(primes);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for &p in primes {
        let pi = p as i64;
        let w = (1.0 / p as f64) / mass;
        let avg = log_mean_by(n, |m| f.eval(pi * m));
        re.add(w * avg.re);
        im.add(w * avg.im);
    }
    let dilated = Complex64::new(re.value(), im.value());
    let bound = (p_max as f64).ln() / log_n + mass.powf(-0.5);
    Ok(DefectRecord::new(
        (base - dilated).norm(),
        bound,
        vec![
            ("P".into(), p_max as f64),
            ("primes".into(), primes.len() as f64),
            ("mertens".into(), mass),
            events_param(f, before),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{e, harmonic_int, sieve_primes};

    fn one(lo: i64, hi: i64) -> SampledFunction {
        SampledFunction::constant(lo, hi, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn shift_trivial_cases() {
        let f = one(-200, 10_200);
        for mode in [AvgMode::Log, AvgMode::Uniform] {
            for h in [-100, -1, 1, 37, 100] {
                assert_eq!(shift_defect(&f, 10_000, h, mode).unwrap().lhs, 0.0);
            }
        }
        let g = one(1, 1000);
        let rec = shift_defect(&g, 1000, 1, AvgMode::Uniform).unwrap();
        assert!((rec.lhs - 1.0 / 1000.0).abs() < 1e-15);
        assert_eq!(rec.param("range_events"), Some(1.0));
        assert!(shift_defect(&g, 1000, 0, AvgMode::Log).is_err());
        assert!(shift_defect(&g, 1000, 1000, AvgMode::Log).is_err());
    }

    #[test]
    fn residue_split_cases() {
        let f = one(1, 40_100);
        assert_eq!(residue_split_defect(&f, 10_000, 4).unwrap().lhs, 0.0);
        let r = SampledFunction::random_disc(1, 10_000, 3, 0).unwrap();
        assert_eq!(residue_split_defect(&r, 10_000, 1).unwrap().lhs, 0.0);
        // q-periodic phase with value e(a/3) on the class a
        let p = SampledFunction::from_fn(0, 30_010, 1.0, |m| e((m.rem_euclid(3)) as f64 / 3.0)).unwrap();
        let rec = residue_split_defect(&p, 10_000, 3).unwrap();
        // split average is mean of e(a/3) = 0; base is E^log e(n/3)
        let base = log_mean_by(10_000, |m| e((m % 3) as f64 / 3.0));
        assert!((rec.lhs - base.norm()).abs() < 1e-12);
        assert!(rec.ratio <= 1.0);
    }

    #[test]
    fn frobenius_cases() {
        let f = one(1, 200_000);
        assert!(frobenius_defect(&f, 10_000, 3, 2, 50).unwrap().lhs < 1e-12);
        assert!(frobenius_defect(&f, 10_000, 4, 2, 50).is_err());
        let r = SampledFunction::random_disc(1, 20_000, 9, 0).unwrap();
        let rec = frobenius_defect(&r, 10_000, 1, 1, 30).unwrap();
        assert!(rec.ratio <= 1.0);
        // fast path agrees with the counting fallback
        let small = SampledFunction::random_disc(1, 3_000, 2, 0).unwrap();
        let fast = frobenius_defect(&small, 1_000, 2, 3, 10).unwrap();
        let direct_avg = log_mean_by(1_000, |m| {
            (1..=10).map(|h| small.eval(2 * m + 3 * h)).sum::<Complex64>() / 10.0
        });
        let base = log_mean_by(1_000, |m| small.eval(m));
        assert!((fast.lhs - (direct_avg - base).norm()).abs() < 1e-12);
    }

    #[test]
    fn dilate_cases() {
        let r = SampledFunction::random_disc(1, 5_000, 4, 0).unwrap();
        assert_eq!(dilate_defect(&r, 5_000, 1).unwrap().lhs, 0.0);
        let f = one(1, 100_000);
        for q in [2u64, 3, 7, 50] {
            let rec = dilate_defect(&f, 100_000, q).unwrap();
            let exact = (harmonic_int(100_000) - harmonic_int(100_000 / q)) / harmonic_int(100_000);
            assert!((rec.lhs - exact).abs() < 1e-12, "q={q}");
        }
    }

    #[test]
    fn elliott_cases() {
        let n = 100_000u64;
        let primes: Vec<u64> = sieve_primes(100).unwrap().primes().into_iter().filter(|&p| p > 2).collect();
        let f = one(1, 100 * n as i64);
        assert!(elliott_defect(&f, n, &primes, 100).unwrap().lhs < 1e-12);
        let alt = SampledFunction::from_fn(1, 100 * n as i64, 1.0, |m| e(0.5 * m as f64)).unwrap();
        let rec = elliott_defect(&alt, n, &primes, 100).unwrap();
        assert!(rec.ratio <= 1.0, "{rec:?}");
        // completely multiplicative: 1 on the prime set, -1 on every other prime
        let top = 100 * n as usize;
        let mut sign = vec![1.0f64; top + 1];
        for p in sieve_primes(top as u64).unwrap().primes() {
            if primes.contains(&p) {
                continue;
            }
            let mut pk = p as usize;
            while pk <= top {
                for m in (pk..=top).step_by(pk) {
                    sign[m] = -sign[m];
                }
                match pk.checked_mul(p as usize) {
                    Some(v) => pk = v,
                    None => break,
                }
            }
        }
        let mult = SampledFunction::from_real(1, &sign[1..]).unwrap();
        let rec = elliott_defect(&mult, n, &primes, 100).unwrap();
        assert!(rec.lhs <= rec.bound, "{rec:?}");
        assert!(elliott_defect(&f, n, &[], 100).is_err());
        assert!(elliott_defect(&f, n, &[101], 100).is_err());
    }
}
