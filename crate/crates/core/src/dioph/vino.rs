use crate::averages::{rng_f64, suite_rng};
use crate::error::{domain, Result};
use crate::numtheory::frac_mul;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VinoResult {
    pub alpha: f64,
    pub t: u64,
    pub delta1: f64,
    pub delta2: f64,
    /// `#{t in [T] : ||alpha t|| <= delta1}`.
    pub count: u64,
    pub hypothesis: bool,
    /// Smallest `q <= 16/delta2` with `||alpha q|| <= delta1 / (delta2 T)`.
    pub q: Option<u64>,
    /// Hypothesis held but no such `q` exists.
    pub alarm: bool,
}

#[inline]
fn norm_mul(alpha: f64, t: u64) -> f64 {
    let f = frac_mul(alpha, t as i128);
    f.min(1.0 - f)
}

/// Checks the recurrence lemma: many small `||alpha t||` for `t <= T`
/// force a small `q` with `||alpha q||` tiny.
pub fn vino_verify(alpha: f64, t: u64, delta1: f64, delta2: f64) -> Result<VinoResult> {
    if !alpha.is_finite() {
        return domain("alpha must be finite");
    }
    if !(delta1 > 0.0 && delta2 > 0.0) || t == 0 {
        return domain("delta1, delta2 and T must be positive");
    }
    if delta2 < 32.0 * delta1 {
        return domain(format!("need delta2 >= 32 delta1 (got {delta2} < {})", 32.0 * delta1));
    }
    if (t as f64) < 16.0 / delta2 {
        return domain(format!("need T >= 16/delta2 = {} (got {t})", 16.0 / delta2));
    }
    let count = (1..=t).filter(|&s| norm_mul(alpha, s) <= delta1).count() as u64;
    let hypothesis = count as f64 >= delta2 * t as f64;
    let (q, alarm) = if hypothesis {
        let qmax = (16.0 / delta2).floor() as u64;
        let tol = delta1 / (delta2 * t as f64);
        let q = (1..=qmax).find(|&q| norm_mul(alpha, q) <= tol);
        (q, q.is_none())
    } else {
        (None, false)
    };
    Ok(VinoResult {
        alpha,
        t,
        delta1,
        delta2,
        count,
        hypothesis,
        q,
        alarm,
    })
}

/// One precondition-satisfying draw. Three in four are planted near
/// `a/q0` (so the hypothesis tends to hold), the rest have uniform `alpha`.
pub fn vino_draw(seed: u64, index: u64) -> (f64, u64, f64, f64) {
    let mut rng = suite_rng(seed, index);
    let q0 = rng.gen_range(1..=16u64);
    let delta1 = 10f64.powf(-rng.gen_range(3.0..7.0));
    let lo = 32.0 * delta1;
    let hi = 1.0 / q0 as f64;
    let delta2 = lo + (hi - lo) * rng_f64(&mut rng);
    let tmin = (16.0 / delta2).ceil() as u64;
    let t = rng.gen_range(tmin..=tmin.max(20_000));
    let alpha = if index % 4 == 3 {
        rng_f64(&mut rng)
    } else {
        let a = rng.gen_range(0..q0);
        let eta = (2.0 * rng_f64(&mut rng) - 1.0) * delta1 / (2.0 * t as f64);
        a as f64 / q0 as f64 + eta
    };
    (alpha, t, delta1, delta2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VinoSuite {
    pub draws: u64,
    pub hypothesis_held: u64,
    pub alarms: u64,
    pub results: Vec<VinoResult>,
}

pub fn vino_suite(seed: u64, draws: u64) -> Result<VinoSuite> {
    let results = (0..draws)
        .into_par_iter()
        .map(|i| {
            let (a, t, d1, d2) = vino_draw(seed, i);
            vino_verify(a, t, d1, d2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VinoSuite {
        draws,
        hypothesis_held: results.iter().filter(|r| r.hypothesis).count() as u64,
        alarms: results.iter().filter(|r| r.alarm).count() as u64,
        results,
    })
}
