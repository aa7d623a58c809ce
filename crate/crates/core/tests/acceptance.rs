//! Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::process::ExitCode;

use git_height::bounds::{convex_lemma_min, ell, ell_exact, epsilon_norm_check, Variant};
use git_height::conj_git::{
    complexify, eigen_data, fundamental_formula_difference, instability_conj, is_minimal_arch, is_minimal_nonarch,
    moment_map_conj, naive_height_matrix, orbit_sampling_bound, quotient_height_conj, skew_hermitian_basis, Norm,
};
use git_height::exactpoly::newton_polygon;
use git_height::heights::ProjectivePoint;
use git_height::places::{product_formula_residual, valuation};
use git_height::torus_git::{instability, kempf_ness_profile, quotient_height, TorusAction};
use git_height::{LogValue, MatrixQ, Place, PolyQ, Prime, Rational};
use num_complex::Complex;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ARCH_TOL: f64 = 1e-12;
const C1_ARCH: f64 = 1e-9;
const C2_ARCH: f64 = 1e-10;
const C3_TOL: f64 = 1e-10;
const C3_SAMPLE_SLACK: f64 = 1e-9;
const C4_RESIDUAL: f64 = 1e-9;
/// Relative error of the characteristic polynomial rebuilt from its float roots.
const C4_ROOTS: f64 = 1e-8;
const C6_MOMENT: f64 = 1e-10;
/// Rounding slack for the discrete convexity test, relative to the profile scale.
const C8_SLACK: f64 = 1e-12;
const C9_ELL_ASYMPTOTIC: f64 = 0.01;
const C9_CONVEX: f64 = 1e-8;

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn m(rows: &[Vec<i64>]) -> MatrixQ {
    MatrixQ::from_i64_rows(rows).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, range: i64) -> MatrixQ {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        if rows.iter().flatten().any(|&x| x != 0) {
            return m(&rows);
        }
    }
}

type Outcome = Result<String, String>;

fn criterion_1() -> Outcome {
    let a = TorusAction::rank_one(&[-2, 1, 4]).unwrap();
    let x = ProjectivePoint::from_i64(&[2, 2, 1]).unwrap();
    let h = quotient_height(&a, &x, ARCH_TOL).map_err(|e| e.to_string())?;
    let finite_ok = h.finite_part() == &BTreeMap::from([(2, q(-2, 3))]);
    let arch_err = (h.arch_part() - 3f64.ln()).abs();
    let total_err = (h.to_f64() - (3f64.ln() - 2.0 / 3.0 * 2f64.ln())).abs();
    if finite_ok && arch_err <= C1_ARCH && total_err <= C1_ARCH {
        Ok(format!("h = {h} ≈ {:.6}", h.to_f64()))
    } else {
        Err(format!("h = {h}, arch error {arch_err:e}"))
    }
}

fn criterion_2() -> Outcome {
    let a = TorusAction::rank_one(&[-2, 1, 4]).unwrap();
    let x = ProjectivePoint::from_i64(&[2, 2, 1]).unwrap();
    let at = |v| instability(&a, &x, v, ARCH_TOL).map(|r| r.value).map_err(|e| e.to_string());
    let i2 = at(Place::Finite(prime(2)))?;
    if i2 != LogValue::log_prime(prime(2), q(-2, 3)) {
        return Err(format!("ι_2 = {i2}"));
    }
    for p in [3, 5, 7] {
        let ip = at(Place::Finite(prime(p)))?;
        if ip != LogValue::zero() {
            return Err(format!("ι_{p} = {ip}"));
        }
    }
    let iinf = at(Place::Archimedean)?.to_f64();
    if iinf.abs() > C2_ARCH {
        return Err(format!("ι_∞ = {iinf:e}"));
    }
    Ok(format!("ι_2 = {i2}, ι_3 = ι_5 = ι_7 = 0, |ι_∞| = {:e}", iinf.abs()))
}

fn criterion_3() -> Outcome {
    let phi = m(&[vec![1, 1], vec![0, 1]]);
    let h = quotient_height_conj(&phi, ARCH_TOL).map_err(|e| e.to_string())?.to_f64();
    let naive = naive_height_matrix(&phi).map_err(|e| e.to_string())?.to_f64();
    let sampled = orbit_sampling_bound(&phi, 200, 2024).map_err(|e| e.to_string())?;
    let half_ln2 = 0.5 * 2f64.ln();
    if (h - half_ln2).abs() > C3_TOL {
        return Err(format!("h_quot = {h}"));
    }
    if (naive - 0.5 * 3f64.ln()).abs() > C3_TOL {
        return Err(format!("h = {naive}"));
    }
    if sampled < half_ln2 - C3_SAMPLE_SLACK {
        return Err(format!("sampled orbit height {sampled} below ½ln2"));
    }
    Ok(format!("h_quot = {h:.12}, h = {naive:.12}, min over 200 conjugates = {sampled:.12}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tested = 0;
    let mut worst: f64 = 0.0;
    let mut worst_roots: f64 = 0.0;
    while tested < 100 {
        let n = rng.gen_range(1..=5);
        let phi = random_matrix(&mut rng, n, 9);
        let diff = match fundamental_formula_difference(&phi, ARCH_TOL) {
            Ok(d) => d,
            Err(git_height::conj_git::ConjError::Nilpotent) => continue,
            Err(e) => return Err(format!("{:?}: {e}", phi.to_rows())),
        };
        if !diff.finite_part().is_empty() || diff.is_neg_infinity() {
            return Err(format!("finite parts do not cancel for {:?}: {diff}", phi.to_rows()));
        }
        worst = worst.max(diff.arch_part().abs());
        let rebuilt = rebuild_error(&phi)?;
        if rebuilt > C4_ROOTS {
            return Err(format!(
                "eigenvalues do not reproduce the characteristic polynomial of {:?} ({rebuilt:e})",
                phi.to_rows()
            ));
        }
        worst_roots = worst_roots.max(rebuilt);
        if worst >= C4_RESIDUAL {
            return Err(format!("residual {worst:e} for {:?}", phi.to_rows()));
        }
        tested += 1;
    }
    Ok(format!("100 matrices, finite parts cancel exactly, max residual {worst:e}, roots rebuild charpoly to {worst_roots:.1e}"))
}

/// Largest coefficient error of `∏ (T − λ_i)` against the exact monic
/// characteristic polynomial, relative to `1 + |c|`.
fn rebuild_error(phi: &MatrixQ) -> Result<f64, String> {
    let data = eigen_data(phi, ARCH_TOL).map_err(|e| e.to_string())?;
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    let zeros = vec![Complex::new(0.0, 0.0); data.zero_root_multiplicity];
    for lambda in data.arch_roots.expanded().into_iter().chain(zeros) {
        let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * lambda;
        }
        coeffs = next;
    }
    let monic = data.charpoly.monic();
    if coeffs.len() != monic.coeffs().len() {
        return Err(format!("{} roots for degree {}", coeffs.len() - 1, monic.coeffs().len() - 1));
    }
    Ok(coeffs
        .iter()
        .zip(monic.coeffs())
        .map(|(c, e)| {
            let e = e.to_f64().unwrap_or(f64::NAN);
            (c - e).norm() / (1.0 + e.abs())
        })
        .fold(0.0, f64::max))
}

/// Matrices with a mix of unit and `p`-divisible entries, some nilpotent mod `p`.
fn matrix_near_p(rng: &mut ChaCha8Rng, p: i64) -> MatrixQ {
    let n = rng.gen_range(1..=4);
    let kind = rng.gen_range(0..3);
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = rng.gen_range(-6i64..=6);
                        match kind {
                            0 => x,
                            1 if j <= i => p * x,
                            _ => x * if rng.gen_bool(0.5) { p } else { 1 },
                        }
                    })
                    .collect()
            })
            .collect();
        if rows.iter().flatten().any(|&x| x != 0) {
            return m(&rows);
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut minimal = 0;
    for _ in 0..200 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let phi = matrix_near_p(&mut rng, p as i64);
        let by_reduction = is_minimal_nonarch(&phi, prime(p)).map_err(|e| e.to_string())?.minimal;
        let iota =
            instability_conj(&phi, Place::Finite(prime(p)), Norm::Frobenius, ARCH_TOL).map_err(|e| e.to_string())?;
        if by_reduction != iota.value.is_zero() {
            return Err(format!("disagreement at p = {p} for {:?}: ι_p = {}", phi.to_rows(), iota.value));
        }
        minimal += usize::from(by_reduction);
    }
    Ok(format!("200 matrices, 0 disagreements ({minimal} minimal, {} not)", 200 - minimal))
}

/// Normal matrices (symmetric, skew plus scalar, scaled signed permutations)
/// interleaved with generic ones.
fn maybe_normal(rng: &mut ChaCha8Rng, n: usize) -> MatrixQ {
    let generic = random_matrix(rng, n, 5);
    match rng.gen_range(0..4) {
        0 => generic.add(&generic.transpose()),
        1 => {
            let skew = generic.sub(&generic.transpose());
            skew.add(&MatrixQ::identity(n).scale(&q(rng.gen_range(-3..=3), 1)))
        }
        2 => {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            MatrixQ::from_fn(n, n, |i, j| if perm[i] == j { q(c, 1) } else { q(0, 1) })
        }
        _ => generic,
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut normal = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let phi = maybe_normal(&mut rng, n);
        if phi.is_zero() {
            continue;
        }
        let is_normal = is_minimal_arch(&phi).map_err(|e| e.to_string())?.minimal;
        let c = complexify::<f64>(&phi);
        let mut worst: f64 = 0.0;
        for a in skew_hermitian_basis::<f64>(n) {
            worst = worst.max(moment_map_conj(&c, &a).map_err(|e| e.to_string())?.abs());
        }
        if is_normal != (worst <= C6_MOMENT) {
            return Err(format!("normal = {is_normal} but max |μ| = {worst:e} for {:?}", phi.to_rows()));
        }
        normal += usize::from(is_normal);
    }
    Ok(format!("100 matrices, 0 disagreements ({normal} normal)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let deg = rng.gen_range(1..=6);
        let roots: Vec<Rational> = (0..deg)
            .map(|_| if rng.gen_ratio(1, 10) { q(0, 1) } else { q(rng.gen_range(-60..=60), rng.gen_range(1..=40)) })
            .collect();
        let lead = q(rng.gen_range(1..=30) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=30));
        let f = roots.iter().fold(PolyQ::constant(lead), |acc, r| acc.mul(&PolyQ::linear_root(r.clone())));
        for p in [2, 3, 5] {
            let poly = newton_polygon(&f, prime(p)).map_err(|e| e.to_string())?;
            let mut direct: Vec<Rational> =
                roots.iter().filter_map(|r| valuation(r, prime(p)).finite()).map(|v| q(v, 1)).collect();
            direct.sort();
            let zeros = roots.len() - direct.len();
            if poly.root_valuations() != direct || poly.zero_roots != zeros {
                return Err(format!(
                    "roots {roots:?} at p = {p}: polygon {:?}, direct {direct:?}",
                    poly.root_valuations()
                ));
            }
        }
    }
    Ok("500 polynomials at p ∈ {2, 3, 5}, all valuation multisets equal".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
    for _ in 0..100 {
        let rank = rng.gen_range(1..=3);
        let len = rng.gen_range(2..=6);
        let weights: Vec<Vec<i64>> = (0..len).map(|_| (0..rank).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let a = TorusAction::new(rank, weights).unwrap();
        let coords: Vec<Rational> = (0..len)
            .map(|_| if rng.gen_ratio(1, 5) { q(0, 1) } else { q(rng.gen_range(-20..=20), rng.gen_range(1..=9)) })
            .collect();
        let Ok(x) = ProjectivePoint::new(coords) else { continue };
        let lambda: Vec<i64> = (0..rank).map(|_| rng.gen_range(-3..=3)).collect();
        let psi = kempf_ness_profile::<f64>(&a, &x, &lambda, &grid).map_err(|e| e.to_string())?;
        for (k, w) in psi.windows(3).enumerate() {
            let slack = C8_SLACK * (1.0 + w[0].abs().max(w[1].abs()).max(w[2].abs()));
            if 2.0 * w[1] > w[0] + w[2] + slack {
                return Err(format!("convexity fails at grid index {} for {:?}, λ = {lambda:?}", k + 1, a.weights()));
            }
        }
    }
    Ok("100 random (action, point, λ) triples, 41-point grids, all convex".into())
}

fn criterion_9() -> Outcome {
    let e2 = ell(2).map_err(|e| e.to_string())?;
    if e2 != 2f64.ln() / 2.0 || ell_exact(2).map_err(|e| e.to_string())? != LogValue::log_prime(prime(2), q(1, 2)) {
        return Err(format!("ℓ(2) = {e2}"));
    }
    let diff = (ell(10_000).map_err(|e| e.to_string())? - (10_000f64.ln() - 1.0)).abs();
    if diff >= C9_ELL_ASYMPTOTIC {
        return Err(format!("|ℓ(10000) − (ln 10000 − 1)| = {diff}"));
    }
    let mut norms = Vec::new();
    for w in [2, 3, 4] {
        let c = epsilon_norm_check(w).map_err(|e| e.to_string())?;
        if !c.ok {
            return Err(format!("ε_{w}: norm {} > bound {}", c.norm, c.bound));
        }
        norms.push(format!("‖ε_{w}‖ = {:.6}", c.norm));
    }
    for (variant, target) in [(Variant::Log3, 3f64.ln()), (Variant::LogSqrt3, 0.5 * 3f64.ln())] {
        let min = convex_lemma_min::<f64>(variant, 1e-10);
        if (min.value - target).abs() > C9_CONVEX {
            return Err(format!("{variant:?} minimum {}", min.value));
        }
    }
    Ok(format!("ℓ(2) exact, |ℓ(10⁴) − (ln 10⁴ − 1)| = {diff:.5}, {}, convex minima ln 3 and ½ln 3", norms.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let num: i64 = rng.gen_range(1..=1_000_000_000) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let den: i64 = rng.gen_range(1..=1_000_000_000);
        let x = q(num, den);
        let r = product_formula_residual(&x).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("residual {r} for {x}"));
        }
    }
    Ok("1000 random rationals, residual exactly 0".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("torus quotient height of (2:2:1)", criterion_1),
        ("local instability measures of (2:2:1)", criterion_2),
        ("unipotent conjugation example", criterion_3),
        ("eigenvalue formula on random matrices", criterion_4),
        ("minimality vs residual semi-stability", criterion_5),
        ("normality vs vanishing moment map", criterion_6),
        ("Newton polygon root valuations", criterion_7),
        ("convexity of Kempf-Ness profiles", criterion_8),
        ("bounds suite", criterion_9),
        ("product formula", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
