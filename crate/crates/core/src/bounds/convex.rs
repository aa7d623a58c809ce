use serde::Serialize;

use crate::scalar::Real;

/// The two one-variable convex functions whose minimum gives the lower bound
/// for the torus and the unipotent examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// `2 max{x, −2x} + ½ ln(4e^{−4x} + 4e^{2x} + e^{8x})`, minimum `ln 3`.
    Log3,
    /// `max{0, −x} + ½ ln(2 + e^{2x})`, minimum `½ ln 3`.
    LogSqrt3,
}

impl Variant {
    pub fn eval<F: Real>(self, x: F) -> F {
        let half = F::lit(0.5);
        match self {
            Variant::Log3 => {
                let lin = F::lit(2.0) * x.max(F::lit(-2.0) * x);
                let terms = [F::lit(4.0).ln() - F::lit(4.0) * x, F::lit(4.0).ln() + F::lit(2.0) * x, F::lit(8.0) * x];
                lin + half * crate::scalar::log_sum_exp(terms)
            }
            Variant::LogSqrt3 => {
                let lin = F::zero().max(-x);
                lin + half * crate::scalar::log_sum_exp([F::lit(2.0).ln(), F::lit(2.0) * x])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexMin<F> {
    pub argmin: F,
    pub value: F,
}

/// Golden-section search for a unimodal `f` on `[a, b]`, until the bracket is
/// shorter than `tol`.
pub fn golden_section<F: Real>(f: impl Fn(F) -> F, mut a: F, mut b: F, tol: F) -> ConvexMin<F> {
    let inv_phi = (F::lit(5.0).sqrt() - F::one()) / F::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let x = (a + b) / F::lit(2.0);
    ConvexMin { argmin: x, value: f(x) }
}

/// Numerical minimum of the chosen lemma function over `[−4, 4]`, which
/// contains the minimiser `0`.
pub fn convex_lemma_min<F: Real>(variant: Variant, grid_tol: F) -> ConvexMin<F> {
    golden_section(|x| variant.eval(x), F::lit(-4.0), F::lit(4.0), grid_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima() {
        let m = convex_lemma_min(Variant::Log3, 1e-10);
        assert!((m.value - 3f64.ln()).abs() < 1e-8);
        assert!(m.argmin.abs() < 1e-9);
        let m = convex_lemma_min(Variant::LogSqrt3, 1e-10);
        assert!((m.value - 0.5 * 3f64.ln()).abs() < 1e-8);
        assert!(m.argmin.abs() < 1e-9);
        let m32 = convex_lemma_min(Variant::LogSqrt3, 1e-4_f32);
        assert!((m32.value - 0.5 * 3f32.ln()).abs() < 1e-4);
    }

    #[test]
    fn value_at_zero() {
        assert!((Variant::Log3.eval(0.0f64) - 3f64.ln()).abs() < 1e-15);
        assert!((Variant::LogSqrt3.eval(0.0f64) - 0.5 * 3f64.ln()).abs() < 1e-15);
    }
}
