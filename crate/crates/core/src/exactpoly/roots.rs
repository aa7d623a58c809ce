use num_complex::Complex;
use serde::Serialize;

use crate::scalar::Real;

use super::{PolyError, PolyQ};

pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl ComplexRoot {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Complex roots with multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComplexMultiset {
    pub roots: Vec<ComplexRoot>,
}

impl ComplexMultiset {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// `Σ |λ_i|²` with multiplicity.
    pub fn sum_abs_sq(&self) -> f64 {
        self.roots.iter().map(|r| r.multiplicity as f64 * (r.re * r.re + r.im * r.im)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.roots.iter().map(ComplexRoot::abs).fold(0.0, f64::max)
    }

    /// Each root repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<Complex<f64>> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(Complex::new(r.re, r.im), r.multiplicity)).collect()
    }
}

fn horner<F: Real>(coeffs: &[F], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let mut p = Complex::new(F::zero(), F::zero());
    let mut dp = p;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, F::zero());
    }
    (p, dp)
}

fn backward_scale<F: Real>(coeffs: &[F], z: Complex<F>) -> F {
    let r = z.norm();
    coeffs.iter().rev().fold(F::zero(), |acc, c| acc * r + c.abs())
}

/// All roots of a polynomial with (real) coefficients, ascending degree, by
/// Aberth–Ehrlich simultaneous iteration.
///
/// Starting points sit on a circle whose radius is the Cauchy bound
/// `1 + max |a_i / a_n|`, at angles `2πk/n + 1/2`; the run is deterministic.
/// Converges cubically to simple roots and linearly to multiple ones, so
/// callers with exact input should split off multiplicities first.
///
/// On return every root satisfies `|f(z)| ≤ tol · Σ|a_i||z|^i`.
pub fn aberth<F: Real>(coeffs: &[F], tol: F, max_iter: usize) -> Result<Vec<Complex<F>>, PolyError> {
    let n = coeffs.len().checked_sub(1).ok_or(PolyError::ZeroPolynomial)?;
    let lead = coeffs[n];
    if lead == F::zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex::new(-coeffs[0] / lead, F::zero())]);
    }
    let radius = F::one() + coeffs[..n].iter().map(|c| (*c / lead).abs()).fold(F::zero(), F::max);
    let two_pi = F::TAU();
    let mut z: Vec<Complex<F>> = (0..n)
        .map(|k| {
            let theta = two_pi * F::count(k) / F::count(n) + F::lit(0.5);
            Complex::from_polar(radius, theta)
        })
        .collect();

    let eps = F::epsilon();
    let mut converged = vec![false; n];
    for _ in 0..max_iter {
        let mut max_step = F::zero();
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let (p, dp) = horner(coeffs, z[k]);
            if p.norm() <= eps * backward_scale(coeffs, z[k]) {
                converged[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<F> = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex::new(F::one(), F::zero()) - ratio * repulsion);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] = z[k] - w;
            let rel = w.norm() / z[k].norm().max(F::min_positive_value());
            max_step = max_step.max(rel);
            if rel <= eps * F::lit(4.0) {
                converged[k] = true;
            }
        }
        if converged.iter().all(|&c| c) || max_step <= eps {
            break;
        }
    }

    for zk in z.iter_mut() {
        let (p, _) = horner(coeffs, *zk);
        if !(p.norm() <= tol * backward_scale(coeffs, *zk)) {
            return Err(PolyError::NoConvergence { iterations: max_iter });
        }
        if zk.im.abs() <= F::lit(1e3) * eps * zk.norm() {
            zk.im = F::zero();
        }
    }
    Ok(z)
}

/// Complex roots of a rational polynomial with exact multiplicities.
///
/// Zero roots are split off and the rest is cut into square-free parts over
/// `Q`; each part has only simple roots, which [`aberth`] finds to full
/// precision.
pub fn complex_roots(f: &PolyQ, tol: f64) -> Result<ComplexMultiset, PolyError> {
    complex_roots_with(f, tol, DEFAULT_MAX_ITER)
}

pub fn complex_roots_with(f: &PolyQ, tol: f64, max_iter: usize) -> Result<ComplexMultiset, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (zeros, g) = f.split_zero_roots();
    let mut out = ComplexMultiset::default();
    if zeros > 0 {
        out.roots.push(ComplexRoot { re: 0.0, im: 0.0, multiplicity: zeros });
    }
    for (part, mult) in g.squarefree_decomposition() {
        for z in aberth(&part.to_f64(), tol, max_iter)? {
            out.roots.push(ComplexRoot { re: z.re, im: z.im, multiplicity: mult });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::Poly;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn contains(ms: &ComplexMultiset, z: Complex<f64>, mult: usize) -> bool {
        ms.roots.iter().any(|r| r.multiplicity == mult && close(Complex::new(r.re, r.im), z, 1e-12))
    }

    #[test]
    fn examples() {
        let i = complex_roots(&Poly::from_i64(&[1, 0, 1]), 1e-12).unwrap();
        assert!(contains(&i, Complex::new(0.0, 1.0), 1) && contains(&i, Complex::new(0.0, -1.0), 1));

        let double = complex_roots(&Poly::from_i64(&[1, -2, 1]), 1e-12).unwrap();
        assert_eq!(double.roots, vec![ComplexRoot { re: 1.0, im: 0.0, multiplicity: 2 }]);

        let cube = complex_roots(&Poly::from_i64(&[-1, 0, 0, 1]), 1e-12).unwrap();
        let s = 3f64.sqrt() / 2.0;
        for z in [Complex::new(1.0, 0.0), Complex::new(-0.5, s), Complex::new(-0.5, -s)] {
            assert!(contains(&cube, z, 1), "{z} missing from {cube:?}");
        }
    }

    #[test]
    fn zero_roots_and_degree() {
        let f = Poly::from_i64(&[0, 0, 6, -5, 1]);
        let ms = complex_roots(&f, 1e-12).unwrap();
        assert_eq!(ms.degree(), 4);
        assert!(contains(&ms, Complex::new(0.0, 0.0), 2));
        assert!((ms.sum_abs_sq() - 13.0).abs() < 1e-12);
        assert!((ms.max_abs() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_instantiation() {
        let roots = aberth(&[6.0_f32, -5.0, 1.0], 1e-5, 100).unwrap();
        let mut re: Vec<f32> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - 2.0).abs() < 1e-5 && (re[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let f = Poly::from_i64(&[7, -3, 0, 2, 11, -1, 5]);
        assert_eq!(complex_roots_with(&f, 1e-12, 1), Err(PolyError::NoConvergence { iterations: 1 }));
        assert!(complex_roots(&f, 1e-12).is_ok());
    }
}
