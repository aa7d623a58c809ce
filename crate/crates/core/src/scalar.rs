//! Scalar traits shared by the exact and floating-point kernels.
//!
//! Two families of algorithms live in this crate. The exact ones (characteristic
//! polynomials, linear programming, lattice determinants) only need the field
//! operations and an order, so they are written against [`Scalar`] and run on
//! `BigRational` for bit-exact answers or on `f64` for quick estimates. The
//! analytic ones (root finding, Kempf–Ness minimisation, operator norms) need
//! `exp`/`ln`/`sqrt` and are written against [`Real`], implemented for `f32`
//! and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed};

/// An ordered field: exact rationals or IEEE floats.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + FromPrimitive {
    /// `true` when equality tests on this type are exact.
    const EXACT: bool;

    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("every i64 embeds in the scalar field")
    }
}

impl Scalar for num_rational::BigRational {
    const EXACT: bool = true;
}

impl Scalar for f64 {
    const EXACT: bool = false;
}

impl Scalar for f32 {
    const EXACT: bool = false;
}

/// Floating point: `f32` or `f64`.
pub trait Real:
    Scalar + Float + FloatConst + FromPrimitive + Debug + Display + Sum + Default + Send + Sync + 'static
{
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }

    fn count(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize fits in a float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerically stable `ln Σ exp(a_i)`.
pub fn log_sum_exp<F: Real>(terms: impl IntoIterator<Item = F>) -> F {
    let terms: Vec<F> = terms.into_iter().collect();
    let top = terms.iter().copied().fold(F::neg_infinity(), F::max);
    if top == F::neg_infinity() {
        return top;
    }
    let s: F = terms.iter().map(|&t| (t - top).exp()).sum();
    top + s.ln()
}
