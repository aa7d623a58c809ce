//! Split tori `G_m^r` acting diagonally on projective space.
//!
//! Coordinate `x_i` has weight `m_i ∈ Z^r`: `t ∗ x = (t^{m_0} x_0, …)`. A point
//! is semi-stable iff `0` lies in the convex hull of the weights of its
//! nonzero coordinates, and the infimum of a norm over an orbit only depends
//! on `ξ = log |t|_v ∈ R^r`:
//!
//! * at a prime `p` it is the piecewise-linear minimum
//!   `min_ξ max_i (⟨m_i, ξ⟩ − v_p(x_i)) · log p`, an exact rational LP;
//! * at the archimedean place it is `min_ξ ½ ln Σ x_i² e^{2⟨m_i, ξ⟩}`, a smooth
//!   convex problem whose gradient is the moment map.

mod arch;

use std::collections::BTreeSet;
use std::thread;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::heights::{arch_norm_part, naive_height, HeightError, ProjectivePoint};
use crate::lp::{lexmin, simplex, Backend, Inequality, LexMin, LpOutcome};
use crate::matrix::Matrix;
use crate::places::{ln_abs_rational, support_primes, valuation, LogValue, Place, PlacesError, Prime};
use crate::scalar::{log_sum_exp, Real};

pub use arch::{minimize_log_sum_exp, LseMinimum, Stalled};

/// Iteration cap of the archimedean minimiser.
pub const ARCH_MAX_ITER: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("action has {weights} weights but the point has {coords} coordinates")]
    LengthMismatch { weights: usize, coords: usize },
    #[error("weight {index} has length {got}, expected the torus rank {expected}")]
    RankMismatch { index: usize, expected: usize, got: usize },
    #[error("a torus action needs rank ≥ 1 and at least one weight")]
    Empty,
    #[error("the point is unstable")]
    Unstable,
    #[error("archimedean minimisation did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Places(#[from] PlacesError),
}

/// A linearised action of `G_m^r` on `P^{n-1}` by integer weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAction")]
pub struct TorusAction {
    rank: usize,
    weights: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawAction {
    rank: usize,
    weights: Vec<Vec<i64>>,
}

impl TryFrom<RawAction> for TorusAction {
    type Error = TorusError;

    fn try_from(raw: RawAction) -> Result<Self, TorusError> {
        TorusAction::new(raw.rank, raw.weights)
    }
}

impl TorusAction {
    pub fn new(rank: usize, weights: Vec<Vec<i64>>) -> Result<Self, TorusError> {
        if rank == 0 || weights.is_empty() {
            return Err(TorusError::Empty);
        }
        if let Some((index, w)) = weights.iter().enumerate().find(|(_, w)| w.len() != rank) {
            return Err(TorusError::RankMismatch { index, expected: rank, got: w.len() });
        }
        Ok(TorusAction { rank, weights })
    }

    /// Rank-one action with the given scalar weights.
    pub fn rank_one(weights: &[i64]) -> Result<Self, TorusError> {
        TorusAction::new(1, weights.iter().map(|&w| vec![w]).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn check(&self, x: &ProjectivePoint) -> Result<(), TorusError> {
        if x.len() != self.weights.len() {
            return Err(TorusError::LengthMismatch { weights: self.weights.len(), coords: x.len() });
        }
        Ok(())
    }

    /// `t ∗ x` for `t ∈ (Q^×)^r`.
    pub fn act(&self, t: &[BigRational], x: &ProjectivePoint) -> Result<ProjectivePoint, TorusError> {
        self.check(x)?;
        if t.len() != self.rank {
            return Err(TorusError::RankMismatch { index: 0, expected: self.rank, got: t.len() });
        }
        if t.iter().any(Zero::is_zero) {
            return Err(PlacesError::ZeroInput.into());
        }
        let coords = x
            .coords()
            .iter()
            .zip(&self.weights)
            .map(|(xi, m)| t.iter().zip(m).fold(xi.clone(), |acc, (tj, &mj)| acc * pow(tj, mj)))
            .collect();
        Ok(ProjectivePoint::new(coords)?)
    }

    fn active_weights(&self, x: &ProjectivePoint) -> Vec<Vec<BigRational>> {
        x.active().into_iter().map(|i| self.rational_weight(i)).collect()
    }

    fn rational_weight(&self, i: usize) -> Vec<BigRational> {
        self.weights[i].iter().map(|&v| BigRational::from_integer(v.into())).collect()
    }
}

fn pow(t: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { t.recip() } else { t.clone() };
    (0..e.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * &base)
}

/// Witness attached to an instability measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Minimizer {
    /// Exact `ξ`, in units of `log p` at a prime.
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
    /// No witness: the point is unstable, or the setting has no closed-form
    /// minimiser (conjugation).
    None,
}

impl Serialize for Minimizer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Minimizer::Exact(v) => crate::serde_util::rationals(v, s),
            Minimizer::Float(v) => v.serialize(s),
            Minimizer::None => s.serialize_none(),
        }
    }
}

/// Instability measure at one place.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstabilityReport {
    pub place: Place,
    pub value: LogValue,
    pub minimizer: Minimizer,
    /// Whether the reduction is semi-stable; only meaningful at primes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residually_semistable: Option<bool>,
}

/// LP for `λ ≥ 0`, `Σ λ_i = 1`, `Σ λ_i m_i = 0`, minimising `cost · λ`.
fn convex_zero_lp(ms: &[Vec<BigRational>], cost: &[BigRational]) -> LpOutcome<BigRational> {
    let r = ms.first().map_or(0, Vec::len);
    let a =
        Matrix::from_fn(r + 1, ms.len(), |row, col| if row < r { ms[col][row].clone() } else { BigRational::one() });
    let mut b = vec![BigRational::zero(); r + 1];
    b[r] = BigRational::one();
    simplex(&a, &b, cost)
}

fn zero_in_hull(ms: &[Vec<BigRational>]) -> bool {
    !ms.is_empty() && !matches!(convex_zero_lp(ms, &vec![BigRational::zero(); ms.len()]), LpOutcome::Infeasible)
}

/// Whether `0 ∈ Conv{m_i : x_i ≠ 0}`.
pub fn is_semistable(a: &TorusAction, x: &ProjectivePoint) -> Result<bool, TorusError> {
    a.check(x)?;
    Ok(zero_in_hull(&a.active_weights(x)))
}

fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|n| n / &g).collect()
}

/// A one-parameter subgroup `λ ∈ Z^r` with `⟨m_i, λ⟩ > 0` on every nonzero
/// coordinate, so `λ(t)·x → 0` as `t → 0`; `None` when `x` is semi-stable.
/// The direction is the lexicographically smallest point of
/// `{ξ : ⟨m_i, ξ⟩ ≥ 1}`, cleared to a primitive integer vector.
pub fn destabilizing_1ps(a: &TorusAction, x: &ProjectivePoint) -> Result<Option<Vec<BigInt>>, TorusError> {
    a.check(x)?;
    let ms = a.active_weights(x);
    let system: Vec<Inequality<BigRational>> = ms.into_iter().map(|m| Inequality::new(m, BigRational::one())).collect();
    match lexmin(&system, a.rank, Backend::Auto) {
        LexMin::Infeasible => Ok(None),
        LexMin::Feasible { point, .. } => Ok(Some(primitive_integer(&point))),
    }
}

/// `ι_p(x) = min_ξ max_i (⟨m_i, ξ⟩ + log|x_i|_p) − max_i log|x_i|_p`.
pub fn instability_nonarch(a: &TorusAction, x: &ProjectivePoint, p: Prime) -> Result<InstabilityReport, TorusError> {
    instability_nonarch_with(a, x, p, Backend::Auto)
}

/// [`instability_nonarch`] with an explicit LP backend.
///
/// Variables are `(s, ξ)`; the LP is `min s` subject to
/// `s − ⟨m_i, ξ⟩ ≥ −v_p(x_i)` for every nonzero coordinate, all in units of
/// `log p`. The reported `ξ` is the lexicographically smallest minimiser.
pub fn instability_nonarch_with(
    a: &TorusAction,
    x: &ProjectivePoint,
    p: Prime,
    backend: Backend,
) -> Result<InstabilityReport, TorusError> {
    a.check(x)?;
    let place = Place::Finite(p);
    let active = x.active();
    let vals: Vec<i64> = active
        .iter()
        .map(|&i| valuation(&x.coords()[i], p).finite().expect("active coordinates are nonzero"))
        .collect();
    let min_val = *vals.iter().min().expect("a point has a nonzero coordinate");
    let system: Vec<Inequality<BigRational>> = active
        .iter()
        .zip(&vals)
        .map(|(&i, &v)| {
            let mut coeffs = vec![BigRational::one()];
            coeffs.extend(a.rational_weight(i).into_iter().map(|c| -c));
            Inequality::new(coeffs, BigRational::from_integer((v - min_val).into()) * -BigRational::one())
        })
        .collect();
    match lexmin(&system, a.rank + 1, backend) {
        LexMin::Feasible { point, bounded_below } if bounded_below[0] => {
            let s = point[0].clone();
            let value = LogValue::log_prime(p, s.clone());
            Ok(InstabilityReport {
                place,
                value,
                minimizer: Minimizer::Exact(point[1..].to_vec()),
                residually_semistable: Some(s.is_zero()),
            })
        }
        _ => Ok(InstabilityReport {
            place,
            value: LogValue::neg_infinity(),
            minimizer: Minimizer::None,
            residually_semistable: Some(false),
        }),
    }
}

/// Active coordinates that carry weight in some convex combination of the
/// active weights equal to zero. Restricted to them the archimedean problem
/// attains its infimum; the other terms can be sent to zero.
fn minimal_face(ms: &[Vec<BigRational>]) -> Vec<usize> {
    (0..ms.len())
        .filter(|&i| {
            let mut cost = vec![BigRational::zero(); ms.len()];
            cost[i] = -BigRational::one();
            matches!(convex_zero_lp(ms, &cost), LpOutcome::Optimal { value, .. } if value.is_negative())
        })
        .collect()
}

/// A basis of the span of `vs`, chosen among them.
fn span_basis(vs: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut basis = Vec::new();
    for v in vs {
        let mut r = v.clone();
        for (pivot, e) in &echelon {
            if !r[*pivot].is_zero() {
                let f = &r[*pivot] / &e[*pivot];
                for (ri, ei) in r.iter_mut().zip(e) {
                    *ri -= &f * ei;
                }
            }
        }
        if let Some(pivot) = r.iter().position(|c| !c.is_zero()) {
            echelon.push((pivot, r));
            basis.push(v.clone());
        }
    }
    basis
}

/// Gram-Schmidt on linearly independent vectors.
fn orthonormal(vs: &[Vec<BigRational>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut r: Vec<f64> = v.iter().map(|c| c.to_f64().expect("small weights")).collect();
        for _ in 0..2 {
            for e in &out {
                let c: f64 = r.iter().zip(e).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(r.into_iter().map(|x| x / n).collect());
    }
    out
}

/// `ι_∞(x) = min_ξ ½ ln Σ x_i² e^{2⟨m_i, ξ⟩} − ½ ln Σ x_i²`.
///
/// The normalising term is exact; the minimum is a float. When
/// `Σ x_i² m_i = 0` exactly, `ξ = 0` is a critical point and the minimiser is
/// reported exactly. Otherwise the problem is restricted to the minimal face
/// of the weight polytope containing `0` and to the span of its weights, where
/// it is strictly convex and coercive; for points that are semi-stable but not
/// polystable the reported `ξ` minimises that restriction while the infimum
/// itself is only approached at infinity.
pub fn instability_arch(a: &TorusAction, x: &ProjectivePoint, tol: f64) -> Result<InstabilityReport, TorusError> {
    a.check(x)?;
    let place = Place::Archimedean;
    let active = x.active();
    let ms = a.active_weights(x);
    if !zero_in_hull(&ms) {
        return Ok(InstabilityReport {
            place,
            value: LogValue::neg_infinity(),
            minimizer: Minimizer::None,
            residually_semistable: None,
        });
    }
    let coords: Vec<BigRational> = active.iter().map(|&i| x.coords()[i].clone()).collect();
    let normaliser = -arch_norm_part(&coords)?;
    let full_norm = -normaliser.to_f64();

    let moment: Vec<BigRational> = (0..a.rank)
        .map(|j| coords.iter().zip(&ms).fold(BigRational::zero(), |acc, (c, m)| acc + c * c * &m[j]))
        .collect();
    if moment.iter().all(Zero::is_zero) {
        return Ok(InstabilityReport {
            place,
            value: normaliser + LogValue::from_arch(full_norm),
            minimizer: Minimizer::Exact(vec![BigRational::zero(); a.rank]),
            residually_semistable: None,
        });
    }

    let face = minimal_face(&ms);
    let face_ms: Vec<Vec<BigRational>> = face.iter().map(|&i| ms[i].clone()).collect();
    let basis = orthonormal(&span_basis(&face_ms));
    let log_a: Vec<f64> = face.iter().map(|&i| 2.0 * ln_abs_rational(&coords[i])).collect();
    let w: Vec<Vec<f64>> = face_ms
        .iter()
        .map(|m| {
            let m: Vec<f64> = m.iter().map(|c| c.to_f64().expect("small weights")).collect();
            basis.iter().map(|b| b.iter().zip(&m).map(|(x, y)| x * y).sum()).collect()
        })
        .collect();
    let min = minimize_log_sum_exp(&log_a, &w, tol, ARCH_MAX_ITER)
        .map_err(|s| TorusError::NoConvergence { iterations: s.iterations })?;
    let xi: Vec<f64> = (0..a.rank).map(|j| basis.iter().zip(&min.argmin).map(|(b, y)| b[j] * y).sum()).collect();
    // ξ = 0 is always admissible.
    let value = min.value.min(full_norm);
    Ok(InstabilityReport {
        place,
        value: normaliser + LogValue::from_arch(value),
        minimizer: Minimizer::Float(xi),
        residually_semistable: None,
    })
}

/// All places that can contribute: the archimedean place and the primes
/// dividing a coordinate.
pub fn relevant_places(x: &ProjectivePoint) -> Result<Vec<Place>, TorusError> {
    let primes: BTreeSet<Prime> = support_primes(x.coords())?;
    let mut places: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    places.push(Place::Archimedean);
    Ok(places)
}

/// Instability measure at any place.
pub fn instability(a: &TorusAction, x: &ProjectivePoint, v: Place, tol: f64) -> Result<InstabilityReport, TorusError> {
    match v {
        Place::Finite(p) => instability_nonarch(a, x, p),
        Place::Archimedean => instability_arch(a, x, tol),
    }
}

/// Height of the image of `x` in the quotient:
/// `h(x) + Σ_p ι_p(x) + ι_∞(x)`, the sum running over the primes dividing a
/// coordinate (all other `ι_p` vanish).
pub fn quotient_height(a: &TorusAction, x: &ProjectivePoint, tol: f64) -> Result<LogValue, TorusError> {
    let reports = quotient_height_terms(a, x, tol, false)?;
    Ok(naive_height(x)? + reports.into_iter().map(|r| r.value).sum::<LogValue>())
}

/// [`quotient_height`] with one thread per place.
pub fn quotient_height_parallel(a: &TorusAction, x: &ProjectivePoint, tol: f64) -> Result<LogValue, TorusError> {
    let reports = quotient_height_terms(a, x, tol, true)?;
    Ok(naive_height(x)? + reports.into_iter().map(|r| r.value).sum::<LogValue>())
}

/// Per-place instability measures entering [`quotient_height`].
pub fn quotient_height_terms(
    a: &TorusAction,
    x: &ProjectivePoint,
    tol: f64,
    parallel: bool,
) -> Result<Vec<InstabilityReport>, TorusError> {
    if !is_semistable(a, x)? {
        return Err(TorusError::Unstable);
    }
    let places = relevant_places(x)?;
    let reports: Vec<Result<InstabilityReport, TorusError>> = if parallel {
        thread::scope(|s| {
            let handles: Vec<_> = places.iter().map(|&v| s.spawn(move || instability(a, x, v, tol))).collect();
            handles.into_iter().map(|h| h.join().expect("instability worker panicked")).collect()
        })
    } else {
        places.iter().map(|&v| instability(a, x, v, tol)).collect()
    };
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    if reports.iter().any(|r| r.value.is_neg_infinity()) {
        return Err(TorusError::Unstable);
    }
    Ok(reports)
}

fn lambda_weights(a: &TorusAction, x: &ProjectivePoint, lambda: &[i64]) -> Result<Vec<(usize, i64)>, TorusError> {
    a.check(x)?;
    if lambda.len() != a.rank {
        return Err(TorusError::RankMismatch { index: 0, expected: a.rank, got: lambda.len() });
    }
    Ok(x.active().into_iter().map(|i| (i, a.weights[i].iter().zip(lambda).map(|(m, l)| m * l).sum())).collect())
}

/// Archimedean Kempf–Ness profile `ψ(ξ) = ½ ln Σ x_i² e^{2⟨m_i, λ⟩ξ}` on a grid.
pub fn kempf_ness_profile<F: Real>(
    a: &TorusAction,
    x: &ProjectivePoint,
    lambda: &[i64],
    grid: &[F],
) -> Result<Vec<F>, TorusError> {
    let k = lambda_weights(a, x, lambda)?;
    let two = F::lit(2.0);
    let log_a: Vec<F> = k.iter().map(|&(i, _)| two * F::lit(ln_abs_rational(&x.coords()[i]))).collect();
    Ok(grid
        .iter()
        .map(|&xi| {
            let terms = k.iter().zip(&log_a).map(|(&(_, w), &la)| la + two * F::lit(w as f64) * xi);
            log_sum_exp(terms) / two
        })
        .collect())
}

/// Profile at a prime: `max_i (⟨m_i, λ⟩ ξ − v_p(x_i) ln p)`, piecewise linear.
pub fn kempf_ness_profile_nonarch<F: Real>(
    a: &TorusAction,
    x: &ProjectivePoint,
    lambda: &[i64],
    p: Prime,
    grid: &[F],
) -> Result<Vec<F>, TorusError> {
    let k = lambda_weights(a, x, lambda)?;
    let ln_p = F::lit((p.get() as f64).ln());
    let offsets: Vec<F> = k
        .iter()
        .map(|&(i, _)| {
            let v = valuation(&x.coords()[i], p).finite().expect("active coordinates are nonzero");
            -F::lit(v as f64) * ln_p
        })
        .collect();
    Ok(grid
        .iter()
        .map(|&xi| {
            k.iter().zip(&offsets).map(|(&(_, w), &o)| F::lit(w as f64) * xi + o).fold(F::neg_infinity(), F::max)
        })
        .collect())
}
