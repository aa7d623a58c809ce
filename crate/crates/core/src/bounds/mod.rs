//! Explicit lower bounds for quotient heights of tensor representations and
//! the checkable ingredients of their proof.

mod convex;
mod epsilon;
mod perm;

use num_rational::BigRational;
use thiserror::Error;

use crate::places::factor::{factorial_valuation, primes_up_to};
use crate::places::{LogValue, Prime};

pub use convex::{convex_lemma_min, golden_section, ConvexMin, Variant};
pub use epsilon::{epsilon_inverse_w2, epsilon_map, epsilon_norm_check, EpsilonMap, NormCheck};
pub use perm::{perm_invariant_check, self_pairing, PermSpec, Permutation, MAX_TENSOR_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("ℓ(n) needs n ≥ 1")]
    NonPositive,
    #[error("length mismatch: b has {b}, slopes {slopes}, ranks {ranks}")]
    LengthMismatch { b: usize, slopes: usize, ranks: usize },
    #[error("ε maps are built for 2 ≤ w ≤ 4, got {0}")]
    UnsupportedSize(usize),
    #[error("tensor space has dimension {0}, above the limit")]
    DimensionTooLarge(u128),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
}

/// `ℓ(n) = (log n!) / n`.
pub fn ell(n: u64) -> Result<f64, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NonPositive);
    }
    let s: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
    Ok(s / n as f64)
}

/// `ℓ(n)` exactly, from `v_p(n!)` for the primes `p ≤ n`.
pub fn ell_exact(n: u64) -> Result<LogValue, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NonPositive);
    }
    Ok(primes_up_to(n)
        .into_iter()
        .map(|p| {
            let q = BigRational::new(factorial_valuation(n, p).into(), n.into());
            LogValue::log_prime(Prime::new(p).expect("sieve output is prime"), q)
        })
        .sum())
}

/// `−Σ b_i μ_i − Σ_{rk_i ≥ 3} (|b_i| / 2) ℓ(rk_i)`.
///
/// With `b = 0` the bound is `0`, which is attained.
pub fn explicit_lower_bound(b: &[i64], slopes: &[LogValue], ranks: &[u64]) -> Result<LogValue, BoundsError> {
    if b.len() != slopes.len() || b.len() != ranks.len() {
        return Err(BoundsError::LengthMismatch { b: b.len(), slopes: slopes.len(), ranks: ranks.len() });
    }
    let mut total = LogValue::zero();
    for ((&bi, mu), &rk) in b.iter().zip(slopes).zip(ranks) {
        if rk == 0 {
            return Err(BoundsError::NonPositive);
        }
        total = total - mu.scale_int(bi);
        if rk >= 3 && bi != 0 {
            let half_b = BigRational::new(bi.unsigned_abs().into(), 2.into());
            total = total - ell_exact(rk)?.scale(&half_b);
        }
    }
    Ok(total)
}
