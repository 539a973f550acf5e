use super::Coloring;
use crate::error::{capacity, domain, Result};
use crate::numtheory::{harmonic_table, sieve_primes, KahanSum};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Desk-scale stand-ins for the highly divisible set
/// `B_0 = {V^(4^i) : 1 <= i <= imax}` and the prime windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichnessConfig {
    pub v: u64,
    pub imax: u32,
    /// Half-open prime windows `[lo, hi)`; `k` uses the first `k`.
    pub windows: Vec<(u64, u64)>,
    pub kmax: usize,
}

impl RichnessConfig {
    /// `B_0` in increasing order.
    pub fn b_set(&self) -> Result<Vec<u128>> {
        if self.v < 2 || self.imax == 0 {
            return domain("need V >= 2 and imax >= 1");
        }
        (1..=self.imax)
            .map(|i| {
                let e = 4u32.checked_pow(i).filter(|&e| e < 128);
                match e.and_then(|e| (self.v as u128).checked_pow(e)) {
                    Some(b) => Ok(b),
                    None => capacity(format!("V^(4^{i}) does not fit in 128 bits")),
                }
            })
            .collect()
    }

    fn validate_windows(&self) -> Result<()> {
        if self.kmax > self.windows.len() {
            return domain(format!("kmax = {} exceeds the {} windows", self.kmax, self.windows.len()));
        }
        for (i, &(lo, hi)) in self.windows.iter().enumerate() {
            if hi <= lo {
                return domain(format!("window {i} = [{lo}, {hi}) is empty"));
            }
            if i > 0 && self.windows[i - 1].1 > lo {
                return domain(format!("windows {} and {i} overlap", i - 1));
            }
        }
        Ok(())
    }
}

/// `E^log_{n, p_1..p_k} 1_A(b n) 1_A(b' p_1...p_k n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStat {
    pub b: u128,
    pub b2: u128,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichnessReport {
    pub n: u64,
    pub r: u32,
    pub b_set: Vec<u128>,
    /// `table[i][j] = E^log_{n in [N]} 1_{A_j}(b_i n)`, over `n <= N/b_i`.
    pub table: Vec<Vec<f64>>,
    /// `H_{floor(N/b)} / H_N` per `b`.
    pub row_mass: Vec<f64>,
    /// Every row sums to its mass (exactly, in integer arithmetic, when
    /// `N/b <= 10^4`; otherwise to `1e-12`).
    pub partition_ok: bool,
    pub partition_exact_rows: usize,
    /// Number of `b` with average at least `1/(4r)`, per color.
    pub rich_counts: Vec<usize>,
    pub selected_color: u16,
    pub pairs: Vec<PairStat>,
}

impl RichnessReport {
    /// Rows `b`, columns colors.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut head = vec!["b".to_string()];
        head.extend((0..self.r).map(|j| format!("color{j}")));
        out.write_record(&head)?;
        for (b, row) in self.b_set.iter().zip(&self.table) {
            let mut rec = vec![b.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:e}")));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

const EXACT_LIMIT: u64 = 10_000;

/// `sum_j sum_{n <= M, color(bn) = j} L/n == sum_{n <= M} L/n` with
/// `L = lcm(1..M)`.
fn partition_exact(c: &Coloring, b: u64, m: u64) -> bool {
    let mut l = BigUint::from(1u8);
    for k in 1..=m {
        l = l.lcm(&BigUint::from(k));
    }
    let mut per = vec![BigUint::zero(); c.r() as usize];
    let mut total = BigUint::zero();
    for n in 1..=m {
        let t = &l / n;
        per[c.color(b * n) as usize] += &t;
        total += t;
    }
    per.into_iter().fold(BigUint::zero(), |a, x| a + x) == total
}

pub fn richness_scan(c: &Coloring, cfg: &RichnessConfig) -> Result<RichnessReport> {
    cfg.validate_windows()?;
    let b_set = cfg.b_set()?;
    let n = c.n();
    let r = c.r() as usize;
    let harm = harmonic_table(n as usize);
    let hn = harm[n as usize];
    let rows: Vec<(Vec<f64>, f64, bool, bool)> = b_set
        .par_iter()
        .map(|&b| {
            let m = if b > n as u128 { 0 } else { n / b as u64 };
            let mut acc = vec![KahanSum::new(); r];
            for k in 1..=m {
                acc[c.color(b as u64 * k) as usize].add(1.0 / k as f64);
            }
            let row: Vec<f64> = acc.iter().map(|s| s.value() / hn).collect();
            let mass = harm[m as usize] / hn;
            let sum: KahanSum = row.iter().copied().collect();
            let float_ok = (sum.value() - mass).abs() <= 1e-12;
            let exact = m <= EXACT_LIMIT;
            let ok = if exact && m > 0 { partition_exact(c, b as u64, m) } else { float_ok };
            (row, mass, ok && float_ok, exact)
        })
        .collect();
    let partition_ok = rows.iter().all(|r| r.2);
    let partition_exact_rows = rows.iter().filter(|r| r.3).count();
    let threshold = 1.0 / (4.0 * r as f64);
    let rich_counts: Vec<usize> = (0..r).map(|j| rows.iter().filter(|row| row.0[j] >= threshold).count()).collect();
    let selected_color = (0..r).max_by(|&a, &b| rich_counts[a].cmp(&rich_counts[b]).then(b.cmp(&a))).unwrap_or(0) as u16;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
    let row_mass = rows.iter().map(|r| r.1).collect();

    let top = cfg.windows.iter().take(cfg.kmax).map(|w| w.1).max().unwrap_or(2);
    let ptab = sieve_primes(top)?;
    let mut windows: Vec<Vec<u64>> = Vec::new();
    for (i, &(lo, hi)) in cfg.windows.iter().take(cfg.kmax).enumerate() {
        let ps = ptab.primes_in(lo, hi)?;
        if ps.is_empty() {
            return domain(format!("prime window {i} = [{lo}, {hi}) has no primes"));
        }
        windows.push(ps);
    }
    let mut jobs = Vec::new();
    for (i, &b) in b_set.iter().enumerate() {
        for &b2 in &b_set[i + 1..] {
            for k in 1..=cfg.kmax {
                jobs.push((b, b2, k));
            }
        }
    }
    let a = selected_color;
    let pairs = jobs
        .par_iter()
        .map(|&(b, b2, k)| PairStat {
            b,
            b2,
            k,
            value: pair_statistic(c, a, b, b2, &windows[..k], hn),
        })
        .collect();
    Ok(RichnessReport {
        n,
        r: c.r(),
        b_set,
        table,
        row_mass,
        partition_ok,
        partition_exact_rows,
        rich_counts,
        selected_color,
        pairs,
    })
}

/// Log weights `1/p` normalized within each window, `1/n` normalized by
/// `H_N`; only `n` with `b' p_1...p_k n <= N` contribute.
fn pair_statistic(c: &Coloring, a: u16, b: u128, b2: u128, windows: &[Vec<u64>], hn: f64) -> f64 {
    let n = c.n() as u128;
    let masses: Vec<f64> = windows.iter().map(|w| w.iter().map(|&p| 1.0 / p as f64).sum()).collect();
    let mut total = KahanSum::new();
    let mut idx = vec![0usize; windows.len()];
    loop {
        let mut prod = b2;
        let mut w = 1.0;
        for (l, &i) in idx.iter().enumerate() {
            let p = windows[l][i];
            prod = prod.saturating_mul(p as u128);
            w *= (1.0 / p as f64) / masses[l];
        }
        if prod <= n {
            let m = (n / prod) as u64;
            let mut inner = KahanSum::new();
            for k in 1..=m {
                if c.color((b * k as u128) as u64) == a && c.color((prod * k as u128) as u64) == a {
                    inner.add(1.0 / k as f64);
                }
            }
            total.add(w * inner.value() / hn);
        }
        // next index tuple
        let mut l = 0;
        loop {
            if l == idx.len() {
                return total.value();
            }
            idx[l] += 1;
            if idx[l] < windows[l].len() {
                break;
            }
            idx[l] = 0;
            l += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::extremal_coloring;
    use crate::numtheory::harmonic_int;

    fn cfg(v: u64, imax: u32) -> RichnessConfig {
        RichnessConfig {
            v,
            imax,
            windows: vec![(3, 8), (11, 20)],
            kmax: 2,
        }
    }

    #[test]
    fn b_set_values() {
        assert_eq!(cfg(2, 2).b_set().unwrap(), vec![16, 65536]);
        assert_eq!(cfg(2, 3).b_set().unwrap().last(), Some(&(1u128 << 64)));
        assert!(cfg(3, 4).b_set().is_err());
    }

    #[test]
    fn monochrome_rows_are_harmonic_ratios() {
        let c = Coloring::monochrome(5000, 2).unwrap();
        let rep = richness_scan(&c, &cfg(2, 2)).unwrap();
        let hn = harmonic_int(5000);
        for (i, &b) in rep.b_set.iter().enumerate() {
            let m = 5000 / b.min(5001) as u64;
            assert!((rep.table[i][0] - harmonic_int(m) / hn).abs() < 1e-13);
            assert_eq!(rep.table[i][1], 0.0);
        }
        assert!(rep.partition_ok);
        assert_eq!(rep.selected_color, 0);
    }

    #[test]
    fn extremal_three_matches_direct_sums() {
        let c = extremal_coloring(3).unwrap();
        let rep = richness_scan(&c, &cfg(2, 2)).unwrap();
        let hn: f64 = (1..=17).map(|k| 1.0 / k as f64).sum();
        for (i, &b) in rep.b_set.iter().enumerate() {
            for j in 0..3u16 {
                let direct: f64 = (1..=17u64)
                    .filter(|&k| (b as u64).saturating_mul(k) <= 17 && c.color(b as u64 * k) == j)
                    .map(|k| 1.0 / k as f64)
                    .sum::<f64>()
                    / hn;
                assert!((rep.table[i][j as usize] - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_partition_identity() {
        let c = Coloring::random(10_000, 3, 9).unwrap();
        let rep = richness_scan(&c, &RichnessConfig { v: 2, imax: 1, windows: vec![(2, 5)], kmax: 1 }).unwrap();
        assert!(rep.partition_ok);
        assert_eq!(rep.partition_exact_rows, 1);
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("b,color0,color1,color2\n16,"));
    }

    #[test]
    fn pair_statistic_direct() {
        let c = Coloring::random(4000, 2, 4).unwrap();
        let cfg = RichnessConfig { v: 2, imax: 1, windows: vec![(3, 6), (7, 12)], kmax: 2 };
        let hn = harmonic_int(4000);
        let windows = vec![vec![3u64, 5], vec![7u64, 11]];
        let a = 1u16;
        let v = pair_statistic(&c, a, 2, 16, &windows, hn);
        let mut direct = 0.0;
        let (m1, m2) = (1.0 / 3.0 + 0.2, 1.0 / 7.0 + 1.0 / 11.0);
        for &p in &[3u64, 5] {
            for &q in &[7u64, 11] {
                let w = (1.0 / p as f64 / m1) * (1.0 / q as f64 / m2);
                for n in 1..=4000u64 {
                    if 16 * p * q * n <= 4000 && c.color(2 * n) == a && c.color(16 * p * q * n) == a {
                        direct += w / n as f64 / hn;
                    }
                }
            }
        }
        assert!((v - direct).abs() < 1e-14);
        assert!(richness_scan(&c, &cfg).is_ok());
        let bad = RichnessConfig { windows: vec![(24, 29)], kmax: 1, ..cfg };
        assert!(richness_scan(&c, &bad).is_err());
    }
}
