//! Places of `Q`, `p`-adic valuations and the [`LogValue`] number type.
//!
//! Absolute values are normalised so that `|p|_p = 1/p` and `|·|_∞` is the
//! usual one; with this choice `Σ_v log|x|_v = 0` for every nonzero `x`.

pub mod factor;
mod logvalue;
pub mod rational;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use logvalue::LogValue;
pub use rational::{format_rational, ln_abs_bigint, ln_abs_rational, parse_rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacesError {
    #[error("zero has no absolute-value logarithm")]
    ZeroInput,
    #[error("all entries are zero")]
    AllZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
    #[error("cofactor {0} exceeds the factorisation range")]
    FactorizationTooLarge(BigInt),
}

/// A verified prime number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, PlacesError> {
        if factor::is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(PlacesError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = PlacesError;

    fn try_from(p: u64) -> Result<Self, PlacesError> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Archimedean,
    Finite(Prime),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => f.write_str("∞"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// `v_p(x)`, with `+∞` for `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn valuation(x: &BigRational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let bp = p.as_bigint();
    Valuation::Finite(int_valuation(x.numer(), &bp) - int_valuation(x.denom(), &bp))
}

/// `log |x|_v`. Exact at finite places; a float at the archimedean place.
pub fn log_abs(x: &BigRational, v: Place) -> Result<LogValue, PlacesError> {
    match v {
        Place::Finite(p) => match valuation(x, p) {
            Valuation::Infinity => Err(PlacesError::ZeroInput),
            Valuation::Finite(k) => Ok(LogValue::log_prime(p, BigRational::from_integer((-k).into()))),
        },
        Place::Archimedean => {
            if x.is_zero() {
                Err(PlacesError::ZeroInput)
            } else {
                Ok(LogValue::from_arch(rational::ln_abs_rational(x)))
            }
        }
    }
}

/// `Σ_v log|x|_v` over every place of `Q`.
///
/// Over `Q` the archimedean term `ln|x|` is itself an exact combination of
/// `log p`, so it is taken in exact form and the result is the exact zero
/// whenever the product formula holds. The float reading of the archimedean
/// term, [`log_abs`] at [`Place::Archimedean`], is checked against it in the
/// tests.
pub fn product_formula_residual(x: &BigRational) -> Result<LogValue, PlacesError> {
    let mut acc = LogValue::ln_abs_exact(x)?;
    for p in support_primes(std::slice::from_ref(x))? {
        acc += log_abs(x, Place::Finite(p))?;
    }
    Ok(acc)
}

/// Primes dividing a numerator or denominator of some nonzero entry.
pub fn support_primes(xs: &[BigRational]) -> Result<BTreeSet<Prime>, PlacesError> {
    let mut out = BTreeSet::new();
    let mut any = false;
    for x in xs.iter().filter(|x| !x.is_zero()) {
        any = true;
        for n in [x.numer(), x.denom()] {
            for p in factor::factorize(n)?.into_keys() {
                out.insert(Prime(p));
            }
        }
    }
    if any {
        Ok(out)
    } else {
        Err(PlacesError::AllZero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&q(12, 1), p(2)), Valuation::Finite(2));
        assert_eq!(valuation(&q(1, 3), p(3)), Valuation::Finite(-1));
        assert_eq!(valuation(&q(0, 1), p(5)), Valuation::Infinity);
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinity);
    }

    #[test]
    fn primes_are_checked() {
        assert_eq!(Prime::new(4), Err(PlacesError::NotPrime(4)));
        assert_eq!(Prime::new(1), Err(PlacesError::NotPrime(1)));
        assert!(serde_json::from_str::<Prime>("9").is_err());
        assert_eq!(serde_json::from_str::<Prime>("7").unwrap(), p(7));
    }

    #[test]
    fn log_abs_examples() {
        let v = log_abs(&q(1, 3), Place::Finite(p(3))).unwrap();
        assert_eq!(v, LogValue::log_prime(p(3), BigRational::one()));
        let v = log_abs(&q(-2, 1), Place::Archimedean).unwrap();
        assert_eq!(v.arch_part(), 2f64.ln());
        assert!(log_abs(&q(6, 1), Place::Finite(p(5))).unwrap().is_zero());
        assert_eq!(log_abs(&q(0, 1), Place::Archimedean), Err(PlacesError::ZeroInput));
        assert_eq!(log_abs(&q(0, 1), Place::Finite(p(2))), Err(PlacesError::ZeroInput));
    }

    #[test]
    fn product_formula_examples() {
        for x in [q(6, 1), q(-1, 1), q(10, 7)] {
            let r = product_formula_residual(&x).unwrap();
            assert!(r.is_zero(), "{x}: {r}");
        }
        assert_eq!(product_formula_residual(&q(0, 1)), Err(PlacesError::ZeroInput));
    }

    #[test]
    fn product_formula_float_route() {
        // Archimedean term as a float against the exact finite terms.
        let x = q(10, 7);
        let mut acc = log_abs(&x, Place::Archimedean).unwrap();
        for pr in support_primes(std::slice::from_ref(&x)).unwrap() {
            acc += log_abs(&x, Place::Finite(pr)).unwrap();
        }
        assert!(acc.to_f64().abs() < 1e-12);
    }

    #[test]
    fn supports() {
        let s: Vec<u64> = support_primes(&[q(2, 1), q(2, 1), q(1, 1)]).unwrap().iter().map(|p| p.get()).collect();
        assert_eq!(s, vec![2]);
        assert!(support_primes(&[q(1, 1), q(1, 1)]).unwrap().is_empty());
        let s: Vec<u64> = support_primes(&[q(10, 7), q(3, 1)]).unwrap().iter().map(|p| p.get()).collect();
        assert_eq!(s, vec![2, 3, 5, 7]);
        assert_eq!(support_primes(&[q(0, 1)]), Err(PlacesError::AllZero));
    }
}
