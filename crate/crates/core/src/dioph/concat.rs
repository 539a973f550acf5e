use crate::averages::{mean_by, AvgMode, ProgressionSums, SampledFunction};
use crate::error::{domain, Result};
use crate::projections::{u1_norm, u1log_norm, NormParams};
use num_complex::Complex64;

/// Relative tolerance under which two norms count as tied.
const TIE_TOL: f64 = 1e-12;

/// `E_{n in [N]} E_{t,t' in [T]} E_{s in S} f(n + ts) conj f(n + t's)`,
/// computed as `E_n E_s |E_t f(n + ts)|^2`.
///
/// `S` must consist of positive steps and `f` must cover
/// `[1, N + 8 T max S]`.
pub fn concat_hypothesis(f: &SampledFunction, n: u64, s: &[u64], t: u64, mode: AvgMode) -> Result<f64> {
    if n == 0 || t == 0 {
        return domain("N and T must be positive");
    }
    if s.is_empty() || s.contains(&0) {
        return domain("S must be a nonempty set of positive integers");
    }
    let smax = *s.iter().max().unwrap();
    let top = (t as i128 * smax as i128 * 8 + n as i128).min(i64::MAX as i128) as i64;
    f.require_cover(1, top, "concatenation hypothesis")?;
    let sums: Vec<ProgressionSums> = s.iter().map(|&step| ProgressionSums::new(f, step, t)).collect();
    let k = s.len() as f64;
    let v = mean_by(mode, n, |x| {
        // the t = 0 term is absent: x + t s runs over t in [T]
        let acc: f64 = sums.iter().map(|p| p.mean(x).norm_sqr()).sum();
        Complex64::new(acc / k, 0.0)
    });
    Ok(v.re)
}

/// [`concat_hypothesis`] applied to `Delta_{(h, h')} f`.
pub fn concat_hypothesis_differenced(
    f: &SampledFunction,
    n: u64,
    s: &[u64],
    t: u64,
    h: i64,
    h2: i64,
    mode: AvgMode,
) -> Result<f64> {
    concat_hypothesis(&f.difference(h, h2)?, n, s, t, mode)
}

/// `argmax_{q <= qmax}` of the `U^1[N; q, H]` norm (logarithmic or uniform),
/// smallest `q` on ties.
pub fn concat_conclusion_search(f: &SampledFunction, n: u64, hh: u64, qmax: u64, mode: AvgMode) -> Result<(u64, f64)> {
    if qmax == 0 {
        return domain("qmax must be positive");
    }
    let mut best = (0u64, f64::NEG_INFINITY);
    for q in 1..=qmax {
        let p = NormParams::new(n, q, hh)?;
        let v = match mode {
            AvgMode::Log => u1log_norm(f, p)?,
            AvgMode::Uniform => u1_norm(f, p)?,
        };
        if q == 1 || v > best.1 + TIE_TOL * best.1.abs().max(1.0) {
            best = (q, v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::log_mean_by;
    use crate::numtheory::e;

    #[test]
    fn constant_and_even_steps() {
        let f = SampledFunction::constant(1, 2000, Complex64::new(1.0, 0.0)).unwrap();
        let v = concat_hypothesis(&f, 100, &[1, 2, 3], 6, AvgMode::Log).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let g = SampledFunction::from_fn(1, 3000, 1.0, |x| e(x as f64 / 2.0)).unwrap();
        let v = concat_hypothesis(&g, 200, &[2, 4, 10], 7, AvgMode::Uniform).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_quadruple_loop() {
        let (n, t) = (500u64, 5u64);
        let s = [1u64, 3, 4, 7, 9];
        let f = SampledFunction::random_disc(1, 1000, 17, 1).unwrap();
        let fast = concat_hypothesis(&f, n, &s, t, AvgMode::Log).unwrap();
        let naive = log_mean_by(n, |x| {
            let mut acc = Complex64::default();
            for &st in &s {
                for a in 1..=t as i64 {
                    for b in 1..=t as i64 {
                        acc += f.eval(x + a * st as i64) * f.eval(x + b * st as i64).conj();
                    }
                }
            }
            acc / (s.len() as f64 * (t * t) as f64)
        });
        assert!(naive.im.abs() < 1e-12);
        assert!((fast - naive.re).abs() < 1e-12);
    }

    #[test]
    fn coverage_and_domain() {
        let f = SampledFunction::constant(1, 100, Complex64::new(1.0, 0.0)).unwrap();
        assert!(concat_hypothesis(&f, 50, &[2], 5, AvgMode::Log).is_err());
        assert!(concat_hypothesis(&f, 10, &[0], 1, AvgMode::Log).is_err());
    }

    #[test]
    fn differenced_constant_phase() {
        // Delta_{(h,h')} e(a n) is the constant e(a (h - h'))
        let f = SampledFunction::from_fn(-10, 4000, 1.0, |x| e(0.123 * x as f64)).unwrap();
        let v = concat_hypothesis_differenced(&f, 100, &[1, 5], 8, 3, -2, AvgMode::Log).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conclusion_search_finds_period() {
        let one = SampledFunction::constant(1, 3000, Complex64::new(1.0, 0.0)).unwrap();
        let (q, v) = concat_conclusion_search(&one, 500, 20, 10, AvgMode::Log).unwrap();
        assert_eq!(q, 1);
        assert!((v - 1.0).abs() < 1e-12);
        let tri = SampledFunction::from_fn(1, 3000, 1.0, |x| e(x as f64 / 3.0)).unwrap();
        assert_eq!(concat_conclusion_search(&tri, 500, 20, 10, AvgMode::Log).unwrap().0, 3);
        let near = SampledFunction::from_fn(1, 4000, 1.0, |x| e(x as f64 * (2.0 / 7.0 + 1e-6))).unwrap();
        assert_eq!(concat_conclusion_search(&near, 500, 20, 12, AvgMode::Uniform).unwrap().0, 7);
    }
}
