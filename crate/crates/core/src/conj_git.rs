//! `SL_n` acting on `n × n` rational matrices by conjugation.
//!
//! The invariants are the coefficients of the characteristic polynomial, and
//! the orbit infimum of a norm depends only on the eigenvalues: at a prime it
//! is `max |λ_i|_p`, at the archimedean place `√(Σ |λ_i|²)` for the Frobenius
//! norm and `max |λ_i|` for the operator norm. Eigenvalues enter only through
//! Newton polygons and complex moduli, never as algebraic numbers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{
    charpoly, complex_roots, max_root_log_abs, newton_polygon, ComplexMultiset, NewtonPolygon, PolyError,
};
use crate::heights::{arch_norm_part, naive_height, HeightError, ProjectivePoint};
use crate::matrix::{Matrix, MatrixQ};
use crate::places::{support_primes, valuation, LogValue, Place, PlacesError, Prime};
use crate::scalar::Real;
use crate::torus_git::{InstabilityReport, Minimizer};
use crate::PolyQ;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConjError {
    #[error("matrix is {rows}×{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("the zero matrix is not a point of P(End)")]
    ZeroMatrix,
    #[error("the matrix is nilpotent")]
    Nilpotent,
    #[error("A is not skew-hermitian (‖A + A*‖ = {0:e})")]
    NotSkewHermitian(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Places(#[from] PlacesError),
}

/// Norm on `End(C^n)` at the archimedean place.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Frobenius,
    /// Operator norm (largest singular value).
    Sup,
}

fn check(phi: &MatrixQ) -> Result<(), ConjError> {
    if !phi.is_square() {
        return Err(ConjError::NonSquare { rows: phi.rows(), cols: phi.cols() });
    }
    if phi.is_zero() {
        return Err(ConjError::ZeroMatrix);
    }
    Ok(())
}

/// Characteristic polynomial with its per-place root data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenData {
    pub charpoly: PolyQ,
    pub zero_root_multiplicity: usize,
    /// Newton polygons at the primes dividing a coefficient; at every other
    /// prime all nonzero roots are units.
    pub polygons: BTreeMap<u64, NewtonPolygon>,
    pub arch_roots: ComplexMultiset,
}

fn charpoly_primes(f: &PolyQ) -> Result<BTreeSet<Prime>, ConjError> {
    let nonzero: Vec<BigRational> = f.coeffs().iter().filter(|c| !c.is_zero()).cloned().collect();
    Ok(support_primes(&nonzero)?)
}

pub fn eigen_data(phi: &MatrixQ, tol: f64) -> Result<EigenData, ConjError> {
    check(phi)?;
    let f = charpoly(phi)?;
    let (zero_root_multiplicity, _) = f.split_zero_roots();
    let mut polygons = BTreeMap::new();
    for p in charpoly_primes(&f)? {
        polygons.insert(p.get(), newton_polygon(&f, p)?);
    }
    let arch_roots = complex_roots(&f, tol)?;
    Ok(EigenData { charpoly: f, zero_root_multiplicity, polygons, arch_roots })
}

/// Semi-stable iff not nilpotent, i.e. the characteristic polynomial is not `T^n`.
pub fn is_semistable_conj(phi: &MatrixQ) -> Result<bool, ConjError> {
    check(phi)?;
    let f = charpoly(phi)?;
    Ok(f.coeffs()[..phi.rows()].iter().any(|c| !c.is_zero()))
}

fn require_semistable(phi: &MatrixQ) -> Result<PolyQ, ConjError> {
    if !is_semistable_conj(phi)? {
        return Err(ConjError::Nilpotent);
    }
    Ok(charpoly(phi)?)
}

/// `Σ_p log max_i |λ_i|_p + ½ ln Σ |λ_i|²` over the eigenvalues of `φ`.
///
/// The finite part is exact; primes not dividing any coefficient of the
/// characteristic polynomial contribute nothing.
pub fn quotient_height_conj(phi: &MatrixQ, tol: f64) -> Result<LogValue, ConjError> {
    let f = require_semistable(phi)?;
    let mut h = LogValue::zero();
    for p in charpoly_primes(&f)? {
        h += max_root_log_abs(&f, p)?;
    }
    let roots = complex_roots(&f, tol)?;
    Ok(h + LogValue::from_arch(0.5 * roots.sum_abs_sq().ln()))
}

/// The matrix entries as a point of `P(End(Q^n))`.
pub fn matrix_point(phi: &MatrixQ) -> Result<ProjectivePoint, ConjError> {
    check(phi)?;
    Ok(ProjectivePoint::new(phi.entries().to_vec())?)
}

/// Height of `φ` as a point of `P(End)` with the Frobenius norm.
pub fn naive_height_matrix(phi: &MatrixQ) -> Result<LogValue, ConjError> {
    Ok(naive_height(&matrix_point(phi)?)?)
}

fn entry_log_norm(phi: &MatrixQ, p: Prime) -> LogValue {
    let vmin = phi.entries().iter().filter_map(|x| valuation(x, p).finite()).min().expect("nonzero matrix");
    LogValue::log_prime(p, BigRational::from_integer((-vmin).into()))
}

fn report(place: Place, value: LogValue) -> InstabilityReport {
    let residually_semistable = match place {
        Place::Finite(_) => Some(value.is_zero()),
        Place::Archimedean => None,
    };
    InstabilityReport { place, value, minimizer: Minimizer::None, residually_semistable }
}

/// `ι_v(φ) = log inf_g ‖gφg⁻¹‖_v − log ‖φ‖_v`.
///
/// At a prime the norm is the sup of the entries and the value is exact. At
/// the archimedean place `norm` selects Frobenius (exact normalisation, float
/// eigenvalue term) or the operator norm (float throughout, clipped at 0).
pub fn instability_conj(phi: &MatrixQ, v: Place, norm: Norm, tol: f64) -> Result<InstabilityReport, ConjError> {
    check(phi)?;
    if !is_semistable_conj(phi)? {
        let mut r = report(v, LogValue::neg_infinity());
        if r.residually_semistable.is_some() {
            r.residually_semistable = Some(false);
        }
        return Ok(r);
    }
    let f = charpoly(phi)?;
    let value = match (v, norm) {
        (Place::Finite(p), _) => max_root_log_abs(&f, p)? - entry_log_norm(phi, p),
        (Place::Archimedean, Norm::Frobenius) => {
            let roots = complex_roots(&f, tol)?;
            LogValue::from_arch(0.5 * roots.sum_abs_sq().ln()) - arch_norm_part(phi.entries())?
        }
        (Place::Archimedean, Norm::Sup) => {
            let roots = complex_roots(&f, tol)?;
            let sigma = phi.to_f64().spectral_norm();
            LogValue::from_arch((roots.max_abs().ln() - sigma.ln()).min(0.0))
        }
    };
    Ok(report(v, value))
}

/// Primes at which some `ι_p(φ)` can be nonzero: those dividing an entry or a
/// coefficient of the characteristic polynomial.
pub fn relevant_primes(phi: &MatrixQ) -> Result<BTreeSet<Prime>, ConjError> {
    check(phi)?;
    let mut primes = support_primes(phi.entries())?;
    primes.extend(charpoly_primes(&charpoly(phi)?)?);
    Ok(primes)
}

/// `h(φ) + Σ_v ι_v(φ) − h_quot(φ)` with the sup norm at primes and the
/// Frobenius norm at infinity. The finite part is exactly zero.
pub fn fundamental_formula_difference(phi: &MatrixQ, tol: f64) -> Result<LogValue, ConjError> {
    let quotient = quotient_height_conj(phi, tol)?;
    let mut lhs = naive_height_matrix(phi)?;
    for p in relevant_primes(phi)? {
        lhs += instability_conj(phi, Place::Finite(p), Norm::Frobenius, tol)?.value;
    }
    lhs += instability_conj(phi, Place::Archimedean, Norm::Frobenius, tol)?.value;
    Ok(lhs - quotient)
}

/// `|h(φ) + Σ_v ι_v(φ) − h_quot(φ)|` as a float.
pub fn fundamental_formula_residual_conj(phi: &MatrixQ, tol: f64) -> Result<f64, ConjError> {
    Ok(fundamental_formula_difference(phi, tol)?.to_f64().abs())
}

/// Evidence attached to a minimality verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `‖φφᵀ − φᵀφ‖_F`.
    NormalityDefect(f64),
    /// Reduction mod `p` of `φ` scaled to have sup norm 1.
    Reduction(Vec<Vec<u64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub place: Place,
    pub minimal: bool,
    pub witness: Witness,
}

/// Minimal at infinity iff `φ` is normal; decided exactly on rationals.
pub fn is_minimal_arch(phi: &MatrixQ) -> Result<MinimalityReport, ConjError> {
    check(phi)?;
    let t = phi.transpose();
    let defect = phi.mul(&t).sub(&t.mul(phi));
    let minimal = defect.is_zero();
    let norm = defect.frobenius_sq().to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok(MinimalityReport { place: Place::Archimedean, minimal, witness: Witness::NormalityDefect(norm) })
}

/// Float normality test `‖[φ, φᵀ]‖_F ≤ tol · ‖φ‖_F²` for real matrices.
pub fn is_normal_approx<F: Real>(phi: &Matrix<F>, tol: F) -> bool {
    let t = phi.transpose();
    let defect = phi.mul(&t).sub(&t.mul(phi));
    defect.frobenius_sq().sqrt() <= tol * phi.frobenius_sq()
}

fn mod_p(x: &BigRational, p: &BigInt) -> u64 {
    let d = x.denom().mod_floor(p);
    let inv = d.modpow(&(p - BigInt::from(2)), p);
    (x.numer().mod_floor(p) * inv).mod_floor(p).to_u64().expect("residue below p")
}

fn nilpotent_mod_p(m: &[Vec<u64>], p: u64) -> bool {
    let n = m.len();
    let mul = |a: &[Vec<u64>], b: &[Vec<u64>]| -> Vec<Vec<u64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(0u128, |acc, k| (acc + a[i][k] as u128 * b[k][j] as u128) % p as u128) as u64)
                    .collect()
            })
            .collect()
    };
    let mut power = m.to_vec();
    for _ in 1..n {
        power = mul(&power, m);
    }
    power.iter().all(|r| r.iter().all(|&v| v == 0))
}

/// Minimal at `p` iff the reduction of `φ / max|φ_ij|_p` mod `p` is not
/// nilpotent, i.e. `φ` is residually semi-stable.
pub fn is_minimal_nonarch(phi: &MatrixQ, p: Prime) -> Result<MinimalityReport, ConjError> {
    check(phi)?;
    let vmin = phi.entries().iter().filter_map(|x| valuation(x, p).finite()).min().expect("nonzero matrix");
    let pb = p.as_bigint();
    let scale = if vmin >= 0 {
        BigRational::from_integer(pb.pow(vmin as u32)).recip()
    } else {
        BigRational::from_integer(pb.pow((-vmin) as u32))
    };
    let reduced: Vec<Vec<u64>> =
        phi.scale(&scale).to_rows().iter().map(|r| r.iter().map(|x| mod_p(x, &pb)).collect()).collect();
    let minimal = !nilpotent_mod_p(&reduced, p.get());
    Ok(MinimalityReport { place: Place::Finite(p), minimal, witness: Witness::Reduction(reduced) })
}

fn commutator<F: Real>(a: &Matrix<Complex<F>>, b: &Matrix<Complex<F>>) -> Matrix<Complex<F>> {
    let n = a.rows();
    let prod = |x: &Matrix<Complex<F>>, y: &Matrix<Complex<F>>, i: usize, j: usize| -> Complex<F> {
        (0..n).map(|k| x[(i, k)] * y[(k, j)]).fold(Complex::new(F::zero(), F::zero()), |s, v| s + v)
    };
    Matrix::from_fn(n, n, |i, j| prod(a, b, i, j) - prod(b, a, i, j))
}

fn inner<F: Real>(a: &Matrix<Complex<F>>, b: &Matrix<Complex<F>>) -> Complex<F> {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x * y.conj())
        .fold(Complex::new(F::zero(), F::zero()), |s, v| s + v)
}

/// `μ_[φ](A) = (1 / 2πi) ⟨[A, φ], φ⟩ / ‖φ‖²` for a skew-hermitian `A`, with
/// `⟨X, Y⟩ = Tr(X Y*)`. The value is real and equals `Im Tr(A[φ, φ*]) / 2π‖φ‖²`.
pub fn moment_map_conj<F: Real>(phi: &Matrix<Complex<F>>, a: &Matrix<Complex<F>>) -> Result<F, ConjError> {
    let n = phi.rows();
    if !phi.is_square() || a.rows() != n || !a.is_square() {
        return Err(ConjError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let norm_sq = inner(phi, phi).re;
    if norm_sq == F::zero() {
        return Err(ConjError::ZeroMatrix);
    }
    let defect: F = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[(i, j)] + a[(j, i)].conj()).norm_sqr())
        .sum::<F>()
        .sqrt();
    if defect > F::lit(1e-12) {
        return Err(ConjError::NotSkewHermitian(defect.to_f64().unwrap_or(f64::NAN)));
    }
    let pairing = inner(&commutator(a, phi), phi);
    let two_pi_i = Complex::new(F::zero(), F::TAU());
    Ok((pairing / two_pi_i).re / norm_sq)
}

/// Rational matrix viewed as a complex one.
pub fn complexify<F: Real>(phi: &MatrixQ) -> Matrix<Complex<F>> {
    phi.map(|x| Complex::new(F::lit(x.to_f64().unwrap_or(f64::NAN)), F::zero()))
}

/// Real basis of the skew-hermitian `n × n` matrices: `iE_kk`,
/// `E_kl − E_lk` and `i(E_kl + E_lk)` for `k < l`.
pub fn skew_hermitian_basis<F: Real>(n: usize) -> Vec<Matrix<Complex<F>>> {
    let zero = Complex::new(F::zero(), F::zero());
    let one = Complex::new(F::one(), F::zero());
    let i = Complex::new(F::zero(), F::one());
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(Matrix::from_fn(n, n, |a, b| if a == k && b == k { i } else { zero }));
    }
    for k in 0..n {
        for l in k + 1..n {
            out.push(Matrix::from_fn(n, n, |a, b| match (a, b) {
                (a, b) if a == k && b == l => one,
                (a, b) if a == l && b == k => -one,
                _ => zero,
            }));
            out.push(Matrix::from_fn(n, n, |a, b| if (a == k && b == l) || (a == l && b == k) { i } else { zero }));
        }
    }
    out
}

fn random_shear(n: usize, rng: &mut ChaCha8Rng) -> (MatrixQ, MatrixQ) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let c = BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
    let mut g = MatrixQ::identity(n);
    let mut inv = MatrixQ::identity(n);
    g[(i, j)] = c.clone();
    inv[(i, j)] = -c;
    (g, inv)
}

/// Minimum of the height of `gφg⁻¹` over the identity and `n_samples` random
/// `g ∈ SL_n(Q)`, each a product of one to four elementary shears with small
/// rational offsets drawn from a ChaCha stream seeded by `seed`.
pub fn orbit_sampling_bound(phi: &MatrixQ, n_samples: usize, seed: u64) -> Result<f64, ConjError> {
    require_semistable(phi)?;
    let n = phi.rows();
    let mut best = naive_height_matrix(phi)?.to_f64();
    if n < 2 {
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let factors = rng.gen_range(1..=4);
        let mut g = MatrixQ::identity(n);
        let mut g_inv = MatrixQ::identity(n);
        for _ in 0..factors {
            let (s, s_inv) = random_shear(n, &mut rng);
            g = s.mul(&g);
            g_inv = g_inv.mul(&s_inv);
        }
        let conj = g.mul(phi).mul(&g_inv);
        best = best.min(naive_height_matrix(&conj)?.to_f64());
    }
    Ok(best)
}
