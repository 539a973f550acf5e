//! Computational laboratory for the sum-product pattern `{x + y, xy}`.
//!
//! The crate computes the finite objects behind effective partition
//! regularity of `{x + y, xy}`: logarithmic averages and their defect
//! bounds, progression-bias norms and averaging projections, diophantine
//! properties of exponential sums, a Selberg-type majorant for the primes
//! with its Ramanujan-sum band decomposition, extremal colourings with
//! monochromatic-pattern detection, and exact small-`r` thresholds.

pub mod error;
pub mod numtheory;

pub use error::{LabError, Result};
pub mod averages;
pub mod projections;
pub mod suite;
pub mod dioph;
pub mod selberg;
pub mod coloring;
pub mod search;
pub mod cli;
