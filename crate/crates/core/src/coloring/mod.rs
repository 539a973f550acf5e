//! Colorings of `[N]`, monochromatic `{x+y, xy}` detection and the interval
//! construction `a_i = (3^i + 9)/2`.

mod richness;

pub use richness::{richness_scan, PairStat, RichnessConfig, RichnessReport};

use crate::error::{capacity, domain, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `N` a coloring may have.
pub const MAX_COLORING_N: u64 = 200_000_000;

/// `colors[k]` is the color of `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    n: u64,
    r: u32,
    colors: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
struct RleJson {
    n: u64,
    r: u32,
    runs: Vec<(u16, u64)>,
}

impl Coloring {
    pub fn new(r: u32, colors: Vec<u16>) -> Result<Self> {
        if r == 0 || r > u16::MAX as u32 {
            return domain(format!("number of colors r = {r} out of range"));
        }
        if let Some(k) = colors.iter().position(|&c| c as u32 >= r) {
            return domain(format!("color {} of {} is not below r = {r}", colors[k], k + 1));
        }
        Ok(Self {
            n: colors.len() as u64,
            r,
            colors,
        })
    }

    pub fn monochrome(n: u64, r: u32) -> Result<Self> {
        check_n(n)?;
        Self::new(r, vec![0; n as usize])
    }

    /// Uniform random coloring from the suite generator.
    pub fn random(n: u64, r: u32, seed: u64) -> Result<Self> {
        check_n(n)?;
        let mut rng = crate::averages::suite_rng(seed, 0);
        Self::new(r, (0..n).map(|_| rng.gen_range(0..r) as u16).collect())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Color of `x` in `[1, N]`.
    #[inline]
    pub fn color(&self, x: u64) -> u16 {
        self.colors[(x - 1) as usize]
    }

    pub fn colors(&self) -> &[u16] {
        &self.colors
    }

    /// The coloring restricted to `[n]`.
    pub fn restrict(&self, n: u64) -> Result<Self> {
        if n > self.n {
            return domain(format!("cannot restrict [{}] to [{n}]", self.n));
        }
        Ok(Self {
            n,
            r: self.r,
            colors: self.colors[..n as usize].to_vec(),
        })
    }

    pub fn runs(&self) -> Vec<(u16, u64)> {
        let mut out: Vec<(u16, u64)> = Vec::new();
        for &c in &self.colors {
            match out.last_mut() {
                Some((d, len)) if *d == c => *len += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// `{"n": N, "r": r, "runs": [[color, length], ...]}`.
    pub fn to_rle_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_rle_json(s: &str) -> Result<Self> {
        let j: RleJson = serde_json::from_str(s).map_err(|e| crate::LabError::Config(format!("bad coloring JSON: {e}")))?;
        let total: u64 = j.runs.iter().map(|&(_, l)| l).sum();
        if total != j.n {
            return Err(crate::LabError::Config(format!("runs cover {total} integers, n = {}", j.n)));
        }
        check_n(j.n)?;
        let mut colors = Vec::with_capacity(j.n as usize);
        for (c, l) in j.runs {
            colors.extend(std::iter::repeat_n(c, l as usize));
        }
        Self::new(j.r, colors)
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RleJson {
            n: self.n,
            r: self.r,
            runs: self.runs(),
        }
        .serialize(s)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return domain("N must be positive");
    }
    if n > MAX_COLORING_N {
        return capacity(format!("N = {n} exceeds {MAX_COLORING_N}"));
    }
    Ok(())
}

/// Monochromatic pair: `x > y > 2` with `x + y`, `xy <= N` of one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PatternWitness {
    pub x: u64,
    pub y: u64,
    pub color: u16,
    pub sum: u64,
    pub prod: u64,
}

impl PatternWitness {
    /// Re-checks the witness against a coloring.
    pub fn is_valid_for(&self, c: &Coloring) -> bool {
        self.x > self.y
            && self.y > 2
            && self.sum == self.x + self.y
            && self.prod == self.x * self.y
            && self.prod <= c.n()
            && c.color(self.sum) == self.color
            && c.color(self.prod) == self.color
    }
}

/// `a_i = (3^i + 9)/2`.
pub fn extremal_boundary(i: u32) -> Result<u64> {
    let p = 3u64.checked_pow(i).and_then(|v| v.checked_add(9));
    match p {
        Some(v) => Ok(v / 2),
        None => capacity(format!("3^{i} overflows")),
    }
}

/// Colors `[a_i, a_{i+1})` with `i` for `i < r`, and `{1, 2, 3, 4}` with 0,
/// on `[N]` with `N = (3^r + 7)/2 = a_r - 1`.
pub fn extremal_coloring(r: u32) -> Result<Coloring> {
    if r == 0 {
        return domain("r must be positive");
    }
    let bounds = (0..=r).map(extremal_boundary).collect::<Result<Vec<_>>>()?;
    let n = bounds[r as usize] - 1;
    interval_coloring(n, &bounds[..r as usize])
}

/// `[1, a_0)` and `[a_0, a_1)` get color 0, `[a_i, a_{i+1})` gets `i`, the
/// last interval runs to `N`.
pub fn interval_coloring(n: u64, starts: &[u64]) -> Result<Coloring> {
    check_n(n)?;
    if starts.is_empty() || starts.windows(2).any(|w| w[0] >= w[1]) || starts[0] < 1 {
        return domain("interval starts must be positive and increasing");
    }
    let r = starts.len() as u32;
    let mut colors = vec![0u16; n as usize];
    for (i, &a) in starts.iter().enumerate() {
        let end = starts.get(i + 1).copied().unwrap_or(n + 1).min(n + 1);
        for x in a.min(n + 1)..end {
            colors[(x - 1) as usize] = i as u16;
        }
    }
    Coloring::new(r, colors)
}

/// Lexicographically least `(y, x)` monochromatic pair.
pub fn find_monochromatic(c: &Coloring) -> Option<PatternWitness> {
    let n = c.n();
    // y > 2 and x >= y + 1 need y (y + 1) <= N
    let ymax = (1..).take_while(|&y: &u64| y * (y + 1) <= n).last().unwrap_or(0);
    if ymax < 3 {
        return None;
    }
    (3..=ymax).into_par_iter().find_map_first(|y| {
        let mut x = y + 1;
        while x * y <= n {
            let (s, p) = (x + y, x * y);
            let col = c.color(p);
            if c.color(s) == col {
                return Some(PatternWitness {
                    x,
                    y,
                    color: col,
                    sum: s,
                    prod: p,
                });
            }
            x += 1;
        }
        None
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub r: u32,
    pub n: u64,
    pub boundaries: Vec<u64>,
    pub witness: Option<PatternWitness>,
}

impl ExtremalReport {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn verify_extremal(r: u32) -> Result<ExtremalReport> {
    let c = extremal_coloring(r)?;
    Ok(ExtremalReport {
        r,
        n: c.n(),
        boundaries: (0..=r).map(extremal_boundary).collect::<Result<Vec<_>>>()?,
        witness: find_monochromatic(&c),
    })
}
