use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::places::{valuation, LogValue, Prime};

use super::{PolyError, PolyQ};

/// One edge of the lower hull: `length` roots share the valuation `−slope`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub slope: BigRational,
    pub length: usize,
}

/// `p`-adic Newton polygon of a polynomial with its zero roots split off.
///
/// Convention: the root valuations are the *negatives* of the hull slopes,
/// each repeated `length` times. For `T² − 5T + 6` at `p = 2` the hull through
/// `(0, 1), (1, 0), (2, 0)` has slopes `−1, 0`, giving the roots `2` and `3`
/// valuations `1` and `0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonPolygon {
    pub prime: Prime,
    /// Multiplicity of the root `0`, removed before building the hull.
    pub zero_roots: usize,
    #[serde(serialize_with = "crate::serde_util::vertices")]
    pub vertices: Vec<(usize, BigRational)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Valuations of the nonzero roots, ascending, with multiplicity.
    pub fn root_valuations(&self) -> Vec<BigRational> {
        // Slopes increase along the hull, so negated slopes come out descending.
        let mut out: Vec<BigRational> =
            self.segments.iter().flat_map(|s| std::iter::repeat_n(-s.slope.clone(), s.length)).collect();
        out.reverse();
        out
    }

    /// Number of nonzero roots.
    pub fn nonzero_roots(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Smallest valuation among nonzero roots.
    pub fn min_root_valuation(&self) -> Option<BigRational> {
        self.segments.last().map(|s| -s.slope.clone())
    }
}

fn cross(o: &(usize, BigRational), a: &(usize, BigRational), b: &(usize, BigRational)) -> BigRational {
    let ax = BigRational::from_integer(BigInt::from(a.0 as i64 - o.0 as i64));
    let bx = BigRational::from_integer(BigInt::from(b.0 as i64 - o.0 as i64));
    ax * (&b.1 - &o.1) - bx * (&a.1 - &o.1)
}

/// Lower convex hull of `{(i, v_p(a_i)) : a_i ≠ 0}` after removing `T^k`.
pub fn newton_polygon(f: &PolyQ, p: Prime) -> Result<NewtonPolygon, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (zero_roots, g) = f.split_zero_roots();
    let points: Vec<(usize, BigRational)> = g
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let v = valuation(c, p).finite().expect("nonzero coefficient");
            (i, BigRational::from_integer(v.into()))
        })
        .collect();

    // Andrew's monotone chain, lower half; points are already sorted by x.
    let mut hull: Vec<(usize, BigRational)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt).is_positive() {
            hull.pop();
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            Segment { slope: (&w[1].1 - &w[0].1) / BigRational::from_integer(BigInt::from(len)), length: len }
        })
        .collect();
    Ok(NewtonPolygon { prime: p, zero_roots, vertices: hull, segments })
}

/// `log max_i |λ_i|_p` over the nonzero roots `λ_i` of `f`, exactly.
pub fn max_root_log_abs(f: &PolyQ, p: Prime) -> Result<LogValue, PolyError> {
    let np = newton_polygon(f, p)?;
    let vmin = np.min_root_valuation().ok_or(PolyError::AllRootsZero)?;
    Ok(LogValue::log_prime(p, -vmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::Poly;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn examples() {
        let f = Poly::from_i64(&[6, -5, 1]);
        assert_eq!(newton_polygon(&f, p(2)).unwrap().root_valuations(), vec![q(0, 1), q(1, 1)]);
        let g = Poly::from_i64(&[-2, 0, 1]);
        assert_eq!(newton_polygon(&g, p(2)).unwrap().root_valuations(), vec![q(1, 2), q(1, 2)]);
        let h = Poly::from_i64(&[1, -2, 1]);
        assert_eq!(newton_polygon(&h, p(3)).unwrap().root_valuations(), vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn max_root_examples() {
        assert!(max_root_log_abs(&Poly::from_i64(&[6, -5, 1]), p(2)).unwrap().is_zero());
        assert_eq!(max_root_log_abs(&Poly::from_i64(&[-2, 0, 1]), p(2)).unwrap(), LogValue::log_prime(p(2), q(-1, 2)));
        assert_eq!(max_root_log_abs(&Poly::from_i64(&[-4, 1]), p(2)).unwrap(), LogValue::log_prime(p(2), q(-2, 1)));
        assert_eq!(max_root_log_abs(&Poly::from_i64(&[0, 0, 1]), p(2)), Err(PolyError::AllRootsZero));
        assert_eq!(max_root_log_abs(&PolyQ::zero(), p(2)), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn zero_roots_are_reported_separately() {
        // T^2 (T - 4)
        let f = Poly::from_i64(&[0, 0, -4, 1]);
        let np = newton_polygon(&f, p(2)).unwrap();
        assert_eq!(np.zero_roots, 2);
        assert_eq!(np.root_valuations(), vec![q(2, 1)]);
    }

    #[test]
    fn collinear_points_merge() {
        // 1 + 2T + 4T^2: all points on one line through (0,0),(2,2).
        let np = newton_polygon(&Poly::from_i64(&[1, 2, 4]), p(2)).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: q(1, 1), length: 2 }]);
        assert_eq!(np.vertices.len(), 2);
    }
}
