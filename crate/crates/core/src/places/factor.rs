//! Integer factorisation for the prime supports of rationals.
//!
//! Small factors are stripped by trial division on the big integer; whatever
//! is left must fit in a `u64`, where deterministic Miller–Rabin and Brent's
//! variant of Pollard rho finish the job.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::PlacesError;

const TRIAL_LIMIT: u64 = 1 << 12;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64, seed: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
    let mut y = seed % n;
    let m = 128;
    let mut g = 1;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let mut seed = 1;
    let d = loop {
        let d = pollard_brent(n, seed);
        if d != n {
            break d;
        }
        seed += 1;
    };
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Prime factorisation of `|n|`; the empty map for `n = ±1`.
pub fn factorize(n: &BigInt) -> Result<BTreeMap<u64, u32>, PlacesError> {
    if n.is_zero() {
        return Err(PlacesError::ZeroInput);
    }
    let mut rest: BigUint = n.magnitude().clone();
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && !rest.is_one() {
        let bp = BigUint::from(p);
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            *out.entry(p).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(out);
    }
    let small = rest
        .to_u64()
        .ok_or_else(|| PlacesError::FactorizationTooLarge(BigInt::from_biguint(Sign::Plus, rest.clone())))?;
    factor_u64_into(small, &mut out);
    Ok(out)
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut acc = 0;
    let mut q = n / p;
    while q > 0 {
        acc += q;
        q /= p;
    }
    acc
}

/// Primes `≤ n`, by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), sieve.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn factorizes_products_of_large_primes() {
        let n = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * BigInt::from(12);
        let f = factorize(&n).unwrap();
        let expect: BTreeMap<u64, u32> = [(2, 2), (3, 1), (998_244_353, 1), (1_000_000_007, 1)].into_iter().collect();
        assert_eq!(f, expect);
        assert!(factorize(&BigInt::from(-1)).unwrap().is_empty());
        assert!(matches!(factorize(&BigInt::zero()), Err(PlacesError::ZeroInput)));
    }

    #[test]
    fn legendre() {
        // 10! = 2^8 · 3^4 · 5^2 · 7
        assert_eq!(factorial_valuation(10, 2), 8);
        assert_eq!(factorial_valuation(10, 3), 4);
        assert_eq!(factorial_valuation(10, 5), 2);
        assert_eq!(factorial_valuation(10, 7), 1);
    }
}
