use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::parse_json_rational;
use crate::places::format_rational;
use crate::scalar::Scalar;

/// Univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type PolyQ = Poly<BigRational>;

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(T::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `T − c`.
    pub fn linear_root(c: T) -> Self {
        Poly::new(vec![-c, T::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| T::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * T::int(i as i64)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let l = l.clone();
                Poly::new(self.coeffs.iter().map(|c| c.clone() / l.clone()).collect())
            }
        }
    }

    pub fn mul(&self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly<T>) -> (Poly<T>, Poly<T>) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / lead.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - c.clone() * dc.clone();
            }
            r[k + dd] = T::zero();
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd. Only meaningful over exact fields.
    pub fn gcd(&self, other: &Poly<T>) -> Poly<T> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Strips the factor `T^k`; returns `k` and the cofactor.
    pub fn split_zero_roots(&self) -> (usize, Poly<T>) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (0, Poly::zero());
        }
        (k, Poly::new(self.coeffs[k..].to_vec()))
    }

    /// Yun's square-free decomposition: pairs `(g_i, i)` with `f = c·Π g_i^i`,
    /// each `g_i` monic, square-free and pairwise coprime. Characteristic 0.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly<T>, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

impl PolyQ {
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c:?}"),
                1 => format!("{c:?}·T"),
                _ => format!("{c:?}·T^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Serialize for PolyQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let coeffs = raw.iter().map(parse_json_rational).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        Ok(Poly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(c: &[i64]) -> PolyQ {
        Poly::from_i64(c)
    }

    #[test]
    fn division_identity() {
        let a = pq(&[1, -3, 0, 2, 5]);
        let b = pq(&[2, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).sub(&r.mul(&Poly::constant(BigRational::from_integer((-1).into())))), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn squarefree_of_repeated_factors() {
        // (T-1)^3 (T+2)^2 T
        let f =
            pq(&[-1, 1]).mul(&pq(&[-1, 1])).mul(&pq(&[-1, 1])).mul(&pq(&[2, 1])).mul(&pq(&[2, 1])).mul(&pq(&[0, 1]));
        let sf = f.squarefree_decomposition();
        assert_eq!(sf, vec![(pq(&[0, 1]), 1), (pq(&[2, 1]), 2), (pq(&[-1, 1]), 3)]);
        assert!(pq(&[5]).squarefree_decomposition().is_empty());
    }

    #[test]
    fn zero_roots_split() {
        let (k, g) = pq(&[0, 0, 3, 1]).split_zero_roots();
        assert_eq!(k, 2);
        assert_eq!(g, pq(&[3, 1]));
    }

    #[test]
    fn json() {
        let p = pq(&[6, -5, 1]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["6","-5","1"]"#);
        assert_eq!(serde_json::from_str::<PolyQ>(&s).unwrap(), p);
    }
}
