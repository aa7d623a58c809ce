mod common;

use common::{int_matrix, prime, rational, sl_element};
use git_height::conj_git::{
    complexify, eigen_data, fundamental_formula_difference, instability_conj, is_minimal_arch, is_minimal_nonarch,
    is_semistable_conj, moment_map_conj, quotient_height_conj, relevant_primes, skew_hermitian_basis, Norm,
};
use git_height::{MatrixQ, Place, Rational};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn shears(n: usize) -> impl Strategy<Value = Vec<(usize, usize, Rational)>> {
    proptest::collection::vec((0..n, 0..n, rational()), 1..=6)
}

fn matrix_and_shears() -> impl Strategy<Value = (MatrixQ, Vec<(usize, usize, Rational)>)> {
    int_matrix(4, 6).prop_flat_map(|m| {
        let n = m.rows();
        (Just(m), shears(n))
    })
}

/// Strictly upper triangular, then conjugated: nilpotent by construction.
fn nilpotent() -> impl Strategy<Value = MatrixQ> {
    (2usize..=4).prop_flat_map(|n| (proptest::collection::vec(-5i64..=5, n * n), shears(n), Just(n))).prop_filter_map(
        "zero matrix",
        |(e, s, n)| {
            let rows: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| if j > i { e[i * n + j] } else { 0 }).collect()).collect();
            let u = MatrixQ::from_i64_rows(&rows).unwrap();
            let (g, g_inv) = sl_element(n, &s);
            let phi = g.mul(&u).mul(&g_inv);
            (!phi.is_zero()).then_some(phi)
        },
    )
}

fn is_nilpotent_oracle(phi: &MatrixQ) -> bool {
    let mut power = phi.clone();
    for _ in 1..phi.rows() {
        power = power.mul(phi);
    }
    power.is_zero()
}

/// Symmetric, diagonal or arbitrary: a mix of normal and non-normal matrices.
fn mixed_matrix() -> impl Strategy<Value = MatrixQ> {
    prop_oneof![
        int_matrix(4, 5),
        int_matrix(4, 5).prop_filter_map("zero matrix", |m| {
            let s = m.add(&m.transpose());
            (!s.is_zero()).then_some(s)
        }),
        proptest::collection::vec(-6i64..=6, 1..=4).prop_filter_map("zero matrix", |d| {
            let m = MatrixQ::diag(&d.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>());
            (!m.is_zero()).then_some(m)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_height_is_conjugation_invariant((phi, s) in matrix_and_shears()) {
        prop_assume!(!is_nilpotent_oracle(&phi));
        let (g, g_inv) = sl_element(phi.rows(), &s);
        prop_assert_eq!(g.mul(&g_inv), MatrixQ::identity(phi.rows()));
        let psi = g.mul(&phi).mul(&g_inv);
        let a = quotient_height_conj(&phi, TOL).unwrap();
        let b = quotient_height_conj(&psi, TOL).unwrap();
        prop_assert_eq!(a.finite_part(), b.finite_part());
        prop_assert!((a.arch_part() - b.arch_part()).abs() <= 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn semistable_iff_not_nilpotent(phi in prop_oneof![int_matrix(4, 3), nilpotent()]) {
        prop_assert_eq!(is_semistable_conj(&phi).unwrap(), !is_nilpotent_oracle(&phi));
    }

    #[test]
    fn instability_is_nonpositive_and_infinite_iff_nilpotent(phi in prop_oneof![int_matrix(4, 6), nilpotent()]) {
        let nil = is_nilpotent_oracle(&phi);
        let mut places: Vec<Place> = relevant_primes(&phi).unwrap().into_iter().map(Place::Finite).collect();
        places.extend([Place::Finite(prime(2)), Place::Finite(prime(97)), Place::Archimedean]);
        for v in places {
            for norm in [Norm::Frobenius, Norm::Sup] {
                let value = instability_conj(&phi, v, norm, TOL).unwrap().value;
                prop_assert_eq!(value.is_neg_infinity(), nil);
                if !nil {
                    prop_assert!(value.to_f64() <= 1e-12, "{:?} {:?}: {}", v, norm, value);
                }
            }
        }
    }

    #[test]
    fn minimal_at_infinity_iff_moment_map_vanishes(phi in mixed_matrix()) {
        let minimal = is_minimal_arch(&phi).unwrap().minimal;
        let c = complexify::<f64>(&phi);
        let worst = skew_hermitian_basis::<f64>(phi.rows())
            .iter()
            .map(|a| moment_map_conj(&c, a).unwrap().abs())
            .fold(0.0, f64::max);
        prop_assert_eq!(minimal, worst <= 1e-10, "moment map {}", worst);
    }

    #[test]
    fn minimal_at_p_iff_instability_vanishes(phi in int_matrix(4, 12), i in 0usize..3) {
        let p = prime([2, 3, 5][i]);
        let minimal = is_minimal_nonarch(&phi, p).unwrap().minimal;
        let value = instability_conj(&phi, Place::Finite(p), Norm::Sup, TOL).unwrap().value;
        prop_assert_eq!(minimal, value.is_zero(), "{}", value);
    }

    #[test]
    fn eigen_data_is_consistent(phi in int_matrix(5, 9)) {
        let n = phi.rows();
        let data = eigen_data(&phi, TOL).unwrap();
        prop_assert_eq!(data.arch_roots.degree(), n);
        for polygon in data.polygons.values() {
            let lengths: usize = polygon.segments.iter().map(|s| s.length).sum();
            prop_assert_eq!(data.zero_root_multiplicity + lengths, n);
        }
    }
}

#[test]
fn fundamental_formula_on_random_matrices() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, TestRng, TestRunner};

    let mut runner =
        TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Config::default().rng_algorithm));
    let strategy = int_matrix(5, 9);
    let mut checked = 0;
    while checked < 100 {
        let phi = strategy.new_tree(&mut runner).unwrap().current();
        if is_nilpotent_oracle(&phi) {
            continue;
        }
        let d = fundamental_formula_difference(&phi, TOL).unwrap();
        assert!(d.finite_part().is_empty(), "{phi:?}: {d}");
        assert!(d.to_f64().abs() < 1e-9, "{phi:?}: {d}");
        checked += 1;
    }
}
