mod common;

use common::{prime, q};
use git_height::exactpoly::{complex_roots, newton_polygon};
use git_height::places::valuation;
use git_height::{PolyQ, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn root() -> impl Strategy<Value = Rational> {
    prop_oneof![1 => Just(q(0, 1)), 9 => (-60i64..=60, 1i64..=40).prop_map(|(n, d)| q(n, d))]
}

fn product(lead: &Rational, roots: &[Rational]) -> PolyQ {
    roots.iter().fold(PolyQ::constant(lead.clone()), |acc, r| acc.mul(&PolyQ::linear_root(r.clone())))
}

fn lead() -> impl Strategy<Value = Rational> {
    (prop_oneof![-30i64..=-1, 1i64..=30], 1i64..=30).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #[test]
    fn newton_valuations_match_roots(roots in proptest::collection::vec(root(), 1..=6), c in lead(), i in 0usize..4) {
        let p = prime([2, 3, 5, 7][i]);
        let f = product(&c, &roots);
        let poly = newton_polygon(&f, p).unwrap();
        let mut direct: Vec<Rational> =
            roots.iter().filter_map(|r| valuation(r, p).finite()).map(|v| q(v, 1)).collect();
        direct.sort();
        prop_assert_eq!(poly.zero_roots, roots.len() - direct.len());
        prop_assert_eq!(poly.root_valuations(), direct);
    }

    /// With the zero roots split off, `Σ slope·length = v(lead) − v(lowest)`:
    /// the negated slopes are the root valuations, which sum to
    /// `v(lowest / lead)`.
    #[test]
    fn slope_lengths_sum_to_valuation_gap(roots in proptest::collection::vec(root(), 1..=6), c in lead(), i in 0usize..4) {
        let p = prime([2, 3, 5, 7][i]);
        let f = product(&c, &roots);
        let poly = newton_polygon(&f, p).unwrap();
        let total: Rational = poly.segments.iter().map(|s| &s.slope * Rational::from_integer(s.length.into())).sum();
        let lowest = f.coeffs().iter().find(|x| !x.is_zero()).unwrap();
        let v = |x: &Rational| valuation(x, p).finite().unwrap();
        prop_assert_eq!(total, q(v(f.leading().unwrap()) - v(lowest), 1));
    }

    #[test]
    fn complex_roots_are_conjugation_symmetric(coeffs in proptest::collection::vec(-20i64..=20, 2..=9)) {
        let f = PolyQ::from_i64(&coeffs);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let roots = complex_roots(&f, 1e-12).unwrap().expanded();
        prop_assert_eq!(roots.len(), f.degree().unwrap());
        for z in &roots {
            let partner = roots.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-9, "no conjugate for {z}");
        }
        // Newton's identities: p_1 = −a_{n−1}/a_n, p_2 = e_1² − 2e_2.
        let monic = f.monic();
        let n = monic.degree().unwrap();
        let a = |k: usize| monic.coeff(k).to_f64().unwrap();
        let e1 = -a(n - 1);
        let e2 = if n >= 2 { a(n - 2) } else { 0.0 };
        let p1: f64 = roots.iter().map(|z| z.re).sum();
        let p2: f64 = roots.iter().map(|z| (z * z).re).sum();
        let scale = 1.0 + e1.abs() + e2.abs();
        prop_assert!((p1 - e1).abs() <= 1e-8 * scale);
        prop_assert!((p2 - (e1 * e1 - 2.0 * e2)).abs() <= 1e-8 * scale * scale);
    }

    /// For real-rooted polynomials `Σ|λ|² = p_2`, read from the coefficients.
    #[test]
    fn sum_abs_sq_matches_power_sum(roots in proptest::collection::vec((-30i64..=30, 1i64..=7), 1..=8)) {
        let roots: Vec<Rational> = roots.into_iter().map(|(n, d)| q(n, d)).collect();
        prop_assume!(roots.iter().any(|r| !r.is_zero()));
        let f = product(&q(1, 1), &roots);
        let n = roots.len();
        let e1 = -f.coeff(n - 1);
        let e2 = if n >= 2 { f.coeff(n - 2) } else { q(0, 1) };
        let p2 = (&e1 * &e1 - e2 * q(2, 1)).to_f64().unwrap();
        let got = complex_roots(&f, 1e-12).unwrap().sum_abs_sq();
        prop_assert!((got - p2).abs() <= 1e-8 * (1.0 + p2), "{got} vs {p2}");
    }
}
