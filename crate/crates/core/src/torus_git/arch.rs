use crate::matrix::Matrix;
use crate::scalar::{log_sum_exp, Real};

/// Outcome of [`minimize_log_sum_exp`].
#[derive(Clone, Debug, PartialEq)]
pub struct LseMinimum<F> {
    pub argmin: Vec<F>,
    pub value: F,
    pub gradient_norm: F,
    pub iterations: usize,
}

/// Failure of [`minimize_log_sum_exp`] to reach the gradient tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Stalled {
    pub iterations: usize,
}

fn objective<F: Real>(log_a: &[F], w: &[Vec<F>], y: &[F]) -> F {
    let two = F::lit(2.0);
    let z = log_a.iter().zip(w).map(|(&la, wi)| la + two * dot(wi, y));
    log_sum_exp(z) / two
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Gradient and Hessian of `½ ln Σ a_i e^{2⟨w_i, y⟩}`.
fn derivatives<F: Real>(log_a: &[F], w: &[Vec<F>], y: &[F]) -> (Vec<F>, Matrix<F>) {
    let k = y.len();
    let two = F::lit(2.0);
    let z: Vec<F> = log_a.iter().zip(w).map(|(&la, wi)| la + two * dot(wi, y)).collect();
    let top = z.iter().copied().fold(F::neg_infinity(), F::max);
    let e: Vec<F> = z.iter().map(|&zi| (zi - top).exp()).collect();
    let total: F = e.iter().copied().sum();
    let p: Vec<F> = e.iter().map(|&ei| ei / total).collect();
    let mut g = vec![F::zero(); k];
    for (pi, wi) in p.iter().zip(w) {
        for j in 0..k {
            g[j] = g[j] + *pi * wi[j];
        }
    }
    let h = Matrix::from_fn(k, k, |a, b| {
        let second: F = p.iter().zip(w).map(|(&pi, wi)| pi * wi[a] * wi[b]).sum();
        two * (second - g[a] * g[b])
    });
    (g, h)
}

fn norm<F: Real>(v: &[F]) -> F {
    dot(v, v).sqrt()
}

/// Minimises `G(y) = ½ ln Σ_i a_i e^{2⟨w_i, y⟩}` over `y ∈ R^k`, with
/// `log_a[i] = ln a_i`.
///
/// The caller must make `G` coercive: the `w_i` span `R^k` and `0` lies in
/// the relative interior of their convex hull. The gradient is the
/// `a`-weighted mean of the `w_i` (the moment map), the Hessian twice their
/// covariance. Damped Newton with an Armijo line search runs until
/// `‖∇G‖ ≤ tol · max(1, max‖w_i‖)`; in one variable a failed line search hands
/// over to bisection on `G'`.
pub fn minimize_log_sum_exp<F: Real>(
    log_a: &[F],
    w: &[Vec<F>],
    tol: F,
    max_iter: usize,
) -> Result<LseMinimum<F>, Stalled> {
    let k = w.first().map_or(0, Vec::len);
    let scale = w.iter().map(|wi| norm(wi)).fold(F::one(), F::max);
    let target = tol * scale;
    let mut y = vec![F::zero(); k];
    let mut value = objective(log_a, w, &y);
    for it in 0..max_iter {
        let (g, h) = derivatives(log_a, w, &y);
        let gn = norm(&g);
        if gn <= target || k == 0 {
            return Ok(LseMinimum { argmin: y, value, gradient_norm: gn, iterations: it });
        }
        let mut d: Vec<F> = match h.inverse() {
            Some(inv) => inv.mul_vec(&g).into_iter().map(|v| -v).collect(),
            None => g.iter().map(|&v| -v).collect(),
        };
        let mut slope = dot(&g, &d);
        if !(slope < F::zero()) {
            d = g.iter().map(|&v| -v).collect();
            slope = -gn * gn;
        }
        let mut t = F::one();
        let mut accepted = false;
        for _ in 0..80 {
            let trial: Vec<F> = y.iter().zip(&d).map(|(&yi, &di)| yi + t * di).collect();
            if trial == y {
                break;
            }
            let tv = objective(log_a, w, &trial);
            let flat = (tv - value).abs() <= F::lit(8.0) * F::epsilon() * (F::one() + value.abs());
            if tv <= value + F::lit(1e-4) * t * slope || (flat && norm(&derivatives(log_a, w, &trial).0) < gn) {
                let step = t * norm(&d);
                y = trial;
                value = tv;
                accepted = true;
                if step <= F::lit(4.0) * F::epsilon() * (F::one() + norm(&y)) {
                    let (g, _) = derivatives(log_a, w, &y);
                    let gn = norm(&g);
                    if gn <= target {
                        return Ok(LseMinimum { argmin: y, value, gradient_norm: gn, iterations: it + 1 });
                    }
                }
                break;
            }
            t = t / F::lit(2.0);
        }
        if !accepted {
            if k == 1 {
                return bisect(log_a, w, y[0], target, max_iter);
            }
            return Err(Stalled { iterations: it });
        }
    }
    let (g, _) = derivatives(log_a, w, &y);
    let gn = norm(&g);
    if gn <= target {
        Ok(LseMinimum { argmin: y, value, gradient_norm: gn, iterations: max_iter })
    } else if k == 1 {
        bisect(log_a, w, y[0], target, max_iter)
    } else {
        Err(Stalled { iterations: max_iter })
    }
}

fn bisect<F: Real>(log_a: &[F], w: &[Vec<F>], start: F, target: F, max_iter: usize) -> Result<LseMinimum<F>, Stalled> {
    let grad = |t: F| derivatives(log_a, w, &[t]).0[0];
    let mut width = F::one();
    let (mut lo, mut hi) = (start - width, start + width);
    let mut guard = 0;
    while grad(lo) > F::zero() || grad(hi) < F::zero() {
        width = width * F::lit(2.0);
        lo = start - width;
        hi = start + width;
        guard += 1;
        if guard > 200 {
            return Err(Stalled { iterations: max_iter });
        }
    }
    for _ in 0..400 {
        let mid = (lo + hi) / F::lit(2.0);
        let gm = grad(mid);
        if gm.abs() <= target || mid == lo || mid == hi {
            let y = vec![mid];
            let value = objective(log_a, w, &y);
            return Ok(LseMinimum { argmin: y, value, gradient_norm: gm.abs(), iterations: max_iter });
        }
        if gm > F::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Stalled { iterations: max_iter })
}
