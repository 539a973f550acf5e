//! Single-integer arithmetic: factorization, Möbius, Ramanujan sums.

use num_integer::Integer;

/// Prime factorization by trial division, ascending `(p, e)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.checked_mul(p).is_some_and(|pp| pp <= n) {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Divisor count `tau(n)`.
pub fn tau(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Ramanujan sum `c_q(n)` through Kluyver's divisor sum
/// `sum_{d | (n, q)} d * mu(q / d)`.
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    assert!(q >= 1, "ramanujan_sum needs q >= 1");
    let g = if n == 0 {
        q
    } else {
        q.gcd(&n.unsigned_abs())
    };
    divisors(g)
        .into_iter()
        .map(|d| d as i64 * mobius(q / d))
        .sum()
}

/// `c_q(n)` for squarefree `q` given its prime factors: the product of
/// `p - 1` over `p | (n, q)` and `-1` over the rest.
#[inline]
pub fn ramanujan_squarefree(primes_of_q: &[u64], n: u64) -> i64 {
    let mut v = 1i64;
    for &p in primes_of_q {
        if n % p == 0 {
            v *= p as i64 - 1;
        } else {
            v = -v;
        }
    }
    v
}

/// `lcm(1, ..., n)`, `None` on overflow.
pub fn lcm_upto(n: u64) -> Option<u64> {
    let mut acc = 1u64;
    for k in 1..=n {
        acc = (acc / acc.gcd(&k)).checked_mul(k)?;
    }
    Some(acc)
}
