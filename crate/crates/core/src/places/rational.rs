use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::PlacesError;

/// Parses `"a"` or `"a/b"` (integers, optional sign, no decimals).
pub fn parse_rational(s: &str) -> Result<BigRational, PlacesError> {
    let bad = || PlacesError::Parse(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Lowest-terms `"a/b"`, or `"a"` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `ln |n|` as a float, also for integers beyond the `f64` range.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |x|` as a float.
pub fn ln_abs_rational(x: &BigRational) -> f64 {
    ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&parse_rational("10/-4").unwrap()), "-5/2");
        assert_eq!(format_rational(&parse_rational(" 7 ").unwrap()), "7");
        assert_eq!(format_rational(&parse_rational("-6/3").unwrap()), "-2");
        for bad in ["", "1.5", "1/0", "a/b", "2//3"] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn ln_of_huge_integers() {
        let n = BigInt::from(3).pow(2000);
        let got = ln_abs_bigint(&n);
        assert!((got - 2000.0 * 3f64.ln()).abs() < 1e-9 * got);
    }
}
