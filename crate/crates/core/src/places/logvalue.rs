use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::factorize;
use super::rational::{format_rational, parse_rational};
use super::{PlacesError, Prime};

/// A real number `Σ_p q_p·log p + a`, or `−∞`.
///
/// The rational coefficients `q_p` are kept exactly; `a` is an ordinary float
/// carrying whatever has no closed form (archimedean minima, complex root
/// moduli). Since the logarithms of distinct primes are linearly independent
/// over `Q`, the exact part is a canonical representation: two values with
/// `arch == 0` are equal as reals iff their coefficient maps are equal.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LogValue {
    finite: BTreeMap<u64, BigRational>,
    arch: f64,
    neg_inf: bool,
}

impl LogValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn neg_infinity() -> Self {
        LogValue { neg_inf: true, ..Self::default() }
    }

    /// `q · log p`.
    pub fn log_prime(p: Prime, q: BigRational) -> Self {
        let mut v = Self::zero();
        v.add_log_prime(p.get(), q);
        v
    }

    /// A purely floating value.
    pub fn from_arch(a: f64) -> Self {
        LogValue { arch: a, ..Self::default() }
    }

    /// Builds a value from raw parts; zero coefficients are dropped.
    pub fn from_parts(finite: BTreeMap<u64, BigRational>, arch: f64) -> Self {
        let mut v = LogValue { arch, ..Self::default() };
        for (p, q) in finite {
            v.add_log_prime(p, q);
        }
        v
    }

    /// `ln |x|` for a nonzero rational, exactly.
    pub fn ln_abs_exact(x: &BigRational) -> Result<Self, PlacesError> {
        if x.is_zero() {
            return Err(PlacesError::ZeroInput);
        }
        let mut v = Self::zero();
        for (p, e) in factorize(x.numer())? {
            v.add_log_prime(p, BigRational::from_integer(BigInt::from(e)));
        }
        for (p, e) in factorize(x.denom())? {
            v.add_log_prime(p, -BigRational::from_integer(BigInt::from(e)));
        }
        Ok(v)
    }

    fn add_log_prime(&mut self, p: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let slot = self.finite.entry(p).or_insert_with(BigRational::zero);
        *slot += q;
        if slot.is_zero() {
            self.finite.remove(&p);
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.neg_inf
    }

    /// Exact coefficients `q_p`. Empty for `−∞`.
    pub fn finite_part(&self) -> &BTreeMap<u64, BigRational> {
        &self.finite
    }

    /// Coefficient of `log p` (zero when absent).
    pub fn coefficient(&self, p: u64) -> BigRational {
        self.finite.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn arch_part(&self) -> f64 {
        self.arch
    }

    /// The exact part alone, with the float summand dropped.
    pub fn exact_part(&self) -> LogValue {
        if self.neg_inf {
            return Self::neg_infinity();
        }
        LogValue { finite: self.finite.clone(), arch: 0.0, neg_inf: false }
    }

    /// `true` when there is no float summand, so the value is known exactly.
    pub fn is_exact(&self) -> bool {
        !self.neg_inf && self.arch == 0.0
    }

    /// Exact zero: no coefficients and no float summand.
    pub fn is_zero(&self) -> bool {
        self.is_exact() && self.finite.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        if self.neg_inf {
            return f64::NEG_INFINITY;
        }
        self.finite.iter().map(|(&p, q)| q.to_f64().unwrap_or(f64::NAN) * (p as f64).ln()).sum::<f64>() + self.arch
    }

    /// Multiplies by a rational. `−∞` is only preserved by positive factors.
    ///
    /// # Panics
    /// On `−∞` times a non-positive rational.
    pub fn scale(&self, q: &BigRational) -> LogValue {
        if self.neg_inf {
            assert!(q.is_positive(), "−∞ can only be scaled by a positive factor");
            return Self::neg_infinity();
        }
        let mut out = LogValue { arch: self.arch * q.to_f64().unwrap_or(f64::NAN), ..Self::zero() };
        for (&p, c) in &self.finite {
            out.add_log_prime(p, c * q);
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> LogValue {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Equality of the real numbers represented, up to `tol` on the float
    /// reading; two `−∞` are equal.
    pub fn approx_eq(&self, other: &LogValue, tol: f64) -> bool {
        match (self.neg_inf, other.neg_inf) {
            (true, true) => true,
            (false, false) => {
                let diff = self.clone() - other.clone();
                diff.to_f64().abs() <= tol
            }
            _ => false,
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(mut self, rhs: LogValue) -> LogValue {
        self += rhs;
        self
    }
}

impl<'a> Add<&'a LogValue> for &'a LogValue {
    type Output = LogValue;

    fn add(self, rhs: &LogValue) -> LogValue {
        self.clone() + rhs.clone()
    }
}

impl AddAssign for LogValue {
    fn add_assign(&mut self, rhs: LogValue) {
        if self.neg_inf || rhs.neg_inf {
            *self = LogValue::neg_infinity();
            return;
        }
        self.arch += rhs.arch;
        for (p, q) in rhs.finite {
            self.add_log_prime(p, q);
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    /// # Panics
    /// On `−∞`, since `+∞` is not representable.
    fn neg(self) -> LogValue {
        assert!(!self.neg_inf, "cannot negate −∞");
        LogValue { finite: self.finite.into_iter().map(|(p, q)| (p, -q)).collect(), arch: -self.arch, neg_inf: false }
    }
}

impl Sub for LogValue {
    type Output = LogValue;

    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::zero(), Add::add)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.neg_inf {
            return f.write_str("-inf");
        }
        let mut terms: Vec<String> = self
            .finite
            .iter()
            .map(|(p, q)| {
                if q.is_one() {
                    format!("log {p}")
                } else if (-q).is_one() {
                    format!("-log {p}")
                } else {
                    format!("{}·log {p}", format_rational(q))
                }
            })
            .collect();
        if self.arch != 0.0 || terms.is_empty() {
            terms.push(format!("{}", self.arch));
        }
        f.write_str(&terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct LogValueRepr {
    finite: BTreeMap<String, String>,
    arch: f64,
    neg_inf: bool,
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LogValueRepr {
            finite: self.finite.iter().map(|(p, q)| (p.to_string(), format_rational(q))).collect(),
            arch: self.arch,
            neg_inf: self.neg_inf,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = LogValueRepr::deserialize(d)?;
        if repr.neg_inf {
            return Ok(LogValue::neg_infinity());
        }
        let mut v = LogValue::from_arch(repr.arch);
        for (p, q) in repr.finite {
            let prime = p
                .parse::<u64>()
                .ok()
                .and_then(|p| Prime::new(p).ok())
                .ok_or_else(|| D::Error::custom(format!("`{p}` is not a prime")))?;
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            v.add_log_prime(prime.get(), q);
        }
        Ok(v)
    }
}
