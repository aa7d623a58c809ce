#![allow(dead_code)]

use git_height::heights::ProjectivePoint;
use git_height::{MatrixQ, Prime, Rational};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-100_000i64..=-1, 1i64..=100_000], 1i64..=100_000).prop_map(|(n, d)| q(n, d))
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

/// A projective point with small rational coordinates, some of them zero.
pub fn point(len: usize) -> impl Strategy<Value = ProjectivePoint> {
    proptest::collection::vec(prop_oneof![1 => Just(q(0, 1)), 4 => rational()], len)
        .prop_filter_map("zero point", |c| ProjectivePoint::new(c).ok())
}

pub fn int_matrix(max_n: usize, range: i64) -> impl Strategy<Value = MatrixQ> {
    (1..=max_n)
        .prop_flat_map(move |n| proptest::collection::vec(proptest::collection::vec(-range..=range, n), n))
        .prop_filter_map("zero matrix", |rows| {
            let m = MatrixQ::from_i64_rows(&rows).unwrap();
            (!m.is_zero()).then_some(m)
        })
}

/// A product of elementary shears `I + c E_ij` and its inverse.
pub fn sl_element(n: usize, shears: &[(usize, usize, Rational)]) -> (MatrixQ, MatrixQ) {
    let mut g = MatrixQ::identity(n);
    let mut g_inv = MatrixQ::identity(n);
    for (i, j, c) in shears {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut s = MatrixQ::identity(n);
        s[(i, j)] = c.clone();
        let mut s_inv = MatrixQ::identity(n);
        s_inv[(i, j)] = -c.clone();
        g = s.mul(&g);
        g_inv = g_inv.mul(&s_inv);
    }
    (g, g_inv)
}
