//! Exact integer kernel: sieves, multiplicative functions, Ramanujan sums,
//! rational approximation and compensated sums.

mod approx;
mod arith;
mod sieve;
mod sums;

pub use approx::{
    best_exact, best_rational_approx, convergent_denominators, dist_num, min_joint_obligation,
    scan_best, smallest_within, RationalApprox, SCAN_LIMIT,
};
pub use arith::{
    divisors, euler_phi, factorize, is_squarefree, lcm_upto, mobius, ramanujan_squarefree,
    ramanujan_sum, tau,
};
pub use sieve::{
    isqrt, sieve_primes, sieve_primes_with_budget, MultiplicativeTables, PrimeTable,
    DEFAULT_SIEVE_BUDGET, DEFAULT_TABLE_BUDGET,
};
pub use sums::{
    dist_to_int, dyadic_fraction, e, e_mul, frac_mul, frac_mul_pow, harmonic, harmonic_int, harmonic_table, ksum, mertens_sum,
    ComplexKahan, KahanSum,
};
