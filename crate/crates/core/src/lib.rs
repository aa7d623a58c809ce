//! Heights on GIT quotients over `Q`.
//!
//! The height of the image of a semi-stable point in a GIT quotient is the
//! height of the point plus the sum, over all places, of its instability
//! measures. Every place contributes `log inf_g ‖g·x‖_v − log ‖x‖_v ≤ 0`, and
//! all but finitely many contributions vanish. This crate computes those
//! terms exactly at the finite places and numerically at the archimedean one,
//! in two closed-form settings:
//!
//! * [`torus_git`]: split tori acting on projective space with integer weights;
//! * [`conj_git`]: `SL_n` acting on `n × n` matrices by conjugation.
//!
//! [`bounds`] holds the explicit lower-bound constants for tensor
//! representations together with the checks on their ingredients.
//!
//! The numeric kernels are generic over the scalar type: exact algorithms run
//! on any [`Scalar`] (rationals or floats), analytic ones on any [`Real`]
//! (`f32`/`f64`). The aliases below fix the types used by the public
//! height API.

pub mod bounds;
pub mod conj_git;
pub mod exactpoly;
pub mod heights;
pub mod lp;
pub mod matrix;
pub mod places;
pub mod scalar;
mod serde_util;
pub mod torus_git;

pub use places::{LogValue, Place, Prime};
pub use scalar::{Real, Scalar};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;
/// Exact rational square matrices.
pub type MatrixQ = matrix::Matrix<Rational>;
/// Double-precision matrices.
pub type MatrixF = matrix::Matrix<f64>;
/// Rational polynomials.
pub type PolyQ = exactpoly::Poly<Rational>;

/// Default tolerance for comparing float readings of [`LogValue`]s.
pub const DEFAULT_COMPARE_TOL: f64 = 1e-9;
/// Default gradient tolerance for archimedean minimisation.
pub const DEFAULT_ARCH_TOL: f64 = 1e-12;
