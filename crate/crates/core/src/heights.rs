//! Heights of rational points and Arakelov degrees of hermitian lattices.
//!
//! The norm at a finite place is the sup norm of the coordinates (the norm of
//! the lattice `Z_p^n`); at the archimedean place it is the `ℓ²` norm, so the
//! height of a point is its Fubini–Study height.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::matrix::MatrixQ;
use crate::places::{
    format_rational, ln_abs_rational, parse_rational, support_primes, valuation, LogValue, PlacesError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("a projective point needs at least one coordinate")]
    EmptyPoint,
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("cannot parse coordinate {index} (`{text}`) of the point")]
    Parse { index: usize, text: String },
    #[error("Gram matrix is not square")]
    NonSquare,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive definite (leading minor {0} ≤ 0)")]
    NotPositiveDefinite(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Places(#[from] PlacesError),
}

/// A point of `P^n(Q)`: nonzero rational coordinates up to scaling.
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    coords: Vec<BigRational>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<BigRational>) -> Result<Self, HeightError> {
        if coords.is_empty() {
            return Err(HeightError::EmptyPoint);
        }
        if coords.iter().all(Zero::is_zero) {
            return Err(HeightError::ZeroPoint);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self, HeightError> {
        Self::new(coords.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }

    /// Indices of the nonzero coordinates.
    pub fn active(&self) -> Vec<usize> {
        (0..self.coords.len()).filter(|&i| !self.coords[i].is_zero()).collect()
    }

    /// The coprime integer representative whose first nonzero entry is positive.
    pub fn primitive(&self) -> Vec<BigInt> {
        let lcm = self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.coords.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let sign = ints.iter().find(|v| !v.is_zero()).map_or(BigInt::one(), |v| v.signum());
        ints.into_iter().map(|v| v / &g * &sign).collect()
    }

    /// Multiplies every coordinate by `lambda ≠ 0`.
    pub fn rescale(&self, lambda: &BigRational) -> Result<Self, HeightError> {
        Self::new(self.coords.iter().map(|c| c * lambda).collect())
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.primitive() == other.primitive()
    }
}

impl Eq for ProjectivePoint {}

impl FromStr for ProjectivePoint {
    type Err = HeightError;

    /// Colon-separated rationals, e.g. `2:2:1` or `10/7:3`.
    fn from_str(s: &str) -> Result<Self, HeightError> {
        let coords = s
            .split(':')
            .enumerate()
            .map(|(index, t)| parse_rational(t).map_err(|_| HeightError::Parse { index, text: t.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coords)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        f.write_str(&parts.join(":"))
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `Σ_i x_i²`.
pub fn sum_of_squares(xs: &[BigRational]) -> BigRational {
    xs.iter().fold(BigRational::zero(), |acc, x| acc + x * x)
}

/// `Σ_p log max_i |x_i|_p` over the primes of the support: an exact value.
pub fn finite_norm_part(xs: &[BigRational]) -> Result<LogValue, HeightError> {
    let mut acc = LogValue::zero();
    for p in support_primes(xs)? {
        let vmin = xs.iter().filter_map(|x| valuation(x, p).finite()).min().expect("nonzero entry");
        acc += LogValue::log_prime(p, BigRational::from_integer((-vmin).into()));
    }
    Ok(acc)
}

/// `ln ‖x‖_2 = ½ ln Σ x_i²`, exact since the sum of squares is rational.
///
/// When the sum of squares has a prime factor beyond the factorisation range
/// the value is returned as a float instead.
pub fn arch_norm_part(xs: &[BigRational]) -> Result<LogValue, HeightError> {
    let half = BigRational::new(1.into(), 2.into());
    let s = sum_of_squares(xs);
    match LogValue::ln_abs_exact(&s) {
        Ok(v) => Ok(v.scale(&half)),
        Err(PlacesError::FactorizationTooLarge(_)) => Ok(LogValue::from_arch(0.5 * ln_abs_rational(&s))),
        Err(e) => Err(e.into()),
    }
}

/// Fubini–Study height `Σ_p log max_i |x_i|_p + ½ ln Σ x_i²`.
///
/// The result is exact (no float summand) unless `Σ x_i²` is out of
/// factorisation range, and independent of the chosen representative.
pub fn naive_height(x: &ProjectivePoint) -> Result<LogValue, HeightError> {
    Ok(finite_norm_part(x.coords())? + arch_norm_part(x.coords())?)
}

/// A free `Z`-module of finite rank with a positive-definite rational Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianLattice {
    gram: MatrixQ,
}

impl HermitianLattice {
    pub fn new(gram: MatrixQ) -> Result<Self, HeightError> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(HeightError::NonSquare);
        }
        if gram != gram.transpose() {
            return Err(HeightError::NotSymmetric);
        }
        if let Some(k) = gram.leading_minors().iter().position(|m| !m.is_positive()) {
            return Err(HeightError::NotPositiveDefinite(k + 1));
        }
        Ok(HermitianLattice { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &MatrixQ {
        &self.gram
    }

    /// Sublattice spanned by the rows of `basis` (coordinates in this lattice).
    pub fn sublattice(&self, basis: &MatrixQ) -> Result<Self, HeightError> {
        if basis.cols() != self.rank() {
            return Err(HeightError::LengthMismatch(basis.cols(), self.rank()));
        }
        Self::new(basis.mul(&self.gram).mul(&basis.transpose()))
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        HermitianLattice { gram: self.gram.direct_sum(&other.gram) }
    }
}

impl Serialize for HermitianLattice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.gram.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianLattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        HermitianLattice::new(MatrixQ::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `deg = −½ ln det(Gram)`, exact.
pub fn arakelov_degree(l: &HermitianLattice) -> Result<LogValue, HeightError> {
    let half = BigRational::new((-1).into(), 2.into());
    Ok(LogValue::ln_abs_exact(&l.gram.det())?.scale(&half))
}

/// `deg / rank`.
pub fn slope(l: &HermitianLattice) -> Result<LogValue, HeightError> {
    let rank = BigRational::from_integer(BigInt::from(l.rank()));
    Ok(arakelov_degree(l)?.scale(&rank.recip()))
}

/// Shift of the minimal quotient height under twisting by lattices of the
/// given slopes: `h − Σ a_i·slope_i`.
pub fn twist_shift(h_min_base: &LogValue, a: &[i64], slopes: &[LogValue]) -> Result<LogValue, HeightError> {
    if a.len() != slopes.len() {
        return Err(HeightError::LengthMismatch(a.len(), slopes.len()));
    }
    Ok(a.iter().zip(slopes).fold(h_min_base.clone(), |acc, (&ai, s)| acc - s.scale_int(ai)))
}
