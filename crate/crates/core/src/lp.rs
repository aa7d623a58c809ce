//! Exact linear programming over an ordered field.
//!
//! Two independent solvers:
//!
//! * [`fourier_motzkin`] projects a system of inequalities variable by variable
//!   and back-substitutes, picking at each coordinate the smallest feasible
//!   value. Putting the objective first therefore yields the optimum together
//!   with the lexicographically smallest minimiser. Cost grows doubly
//!   exponentially with the number of variables, so it is meant for `≤ 3`–4.
//! * [`simplex`] is a dense two-phase tableau method with Bland's rule, for
//!   problems in standard form `min cᵀx, Ax = b, x ≥ 0`. It also returns the
//!   dual solution.
//!
//! With `BigRational` both are exact. The float instantiations use exact
//! comparisons too and are only suitable for well-scaled toy problems.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `coeffs · x ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

impl<T: Scalar> Inequality<T> {
    pub fn new(coeffs: Vec<T>, rhs: T) -> Self {
        Inequality { coeffs, rhs }
    }

    /// Divides by the largest absolute coefficient so duplicates compare equal.
    fn normalized(mut self) -> Self {
        let scale = self.coeffs.iter().map(|c| c.abs()).fold(T::zero(), |a, b| if b > a { b } else { a });
        if !scale.is_zero() {
            for c in &mut self.coeffs {
                *c = c.clone() / scale.clone();
            }
            self.rhs = self.rhs.clone() / scale;
        }
        self
    }
}

/// Result of [`fourier_motzkin`] and [`lexmin`].
#[derive(Clone, Debug, PartialEq)]
pub enum LexMin<T> {
    Infeasible,
    Feasible {
        point: Vec<T>,
        /// Whether each coordinate had a finite lower bound when it was fixed.
        bounded_below: Vec<bool>,
    },
}

fn eliminate<T: Scalar>(system: &[Inequality<T>], k: usize) -> Result<Vec<Inequality<T>>, ()> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out: Vec<Inequality<T>> = Vec::new();
    for c in system {
        let a = &c.coeffs[k];
        if a.is_positive() {
            pos.push(c);
        } else if a.is_negative() {
            neg.push(c);
        } else {
            out.push(c.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let wp = -n.coeffs[k].clone();
            let wn = p.coeffs[k].clone();
            let coeffs: Vec<T> =
                p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| wp.clone() * a.clone() + wn.clone() * b.clone()).collect();
            let rhs = wp.clone() * p.rhs.clone() + wn.clone() * n.rhs.clone();
            out.push(Inequality { coeffs, rhs });
        }
    }
    let mut dedup: Vec<Inequality<T>> = Vec::with_capacity(out.len());
    for c in out {
        if c.coeffs.iter().all(T::is_zero) {
            if c.rhs.is_positive() {
                return Err(());
            }
            continue;
        }
        let c = c.normalized();
        if !dedup.contains(&c) {
            dedup.push(c);
        }
    }
    Ok(dedup)
}

/// Finds a point of `{x : a_i·x ≥ b_i}` by Fourier–Motzkin elimination.
///
/// Coordinates are fixed in order `x_0, x_1, …`; each takes the smallest value
/// compatible with the ones already fixed. A coordinate with no lower bound
/// takes `min(0, upper bound)`, and `0` if it is free.
pub fn fourier_motzkin<T: Scalar>(system: &[Inequality<T>], nvars: usize) -> LexMin<T> {
    debug_assert!(system.iter().all(|c| c.coeffs.len() == nvars));
    // stages[k] involves x_0..=x_k only.
    let mut stages: Vec<Vec<Inequality<T>>> = vec![Vec::new(); nvars.max(1)];
    let mut current: Vec<Inequality<T>> = Vec::new();
    for c in system {
        if c.coeffs.iter().all(T::is_zero) {
            if c.rhs.is_positive() {
                return LexMin::Infeasible;
            }
            continue;
        }
        current.push(c.clone().normalized());
    }
    if nvars == 0 {
        return LexMin::Feasible { point: Vec::new(), bounded_below: Vec::new() };
    }
    for k in (0..nvars).rev() {
        stages[k] = current.clone();
        match eliminate(&current, k) {
            Ok(next) => current = next,
            Err(()) => return LexMin::Infeasible,
        }
    }
    if current.iter().any(|c| c.rhs.is_positive()) {
        return LexMin::Infeasible;
    }

    let mut point: Vec<T> = Vec::with_capacity(nvars);
    let mut bounded_below = Vec::with_capacity(nvars);
    for (k, stage) in stages.iter().enumerate() {
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for c in stage {
            let a = &c.coeffs[k];
            if a.is_zero() {
                continue;
            }
            let rest = (0..k).fold(c.rhs.clone(), |acc, j| acc - c.coeffs[j].clone() * point[j].clone());
            let bound = rest / a.clone();
            if a.is_positive() {
                if lo.as_ref().is_none_or(|l| bound > *l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                // Only possible through float rounding.
                return LexMin::Infeasible;
            }
        }
        bounded_below.push(lo.is_some());
        let v = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => {
                if h < T::zero() {
                    h
                } else {
                    T::zero()
                }
            }
            (None, None) => T::zero(),
        };
        point.push(v);
    }
    LexMin::Feasible { point, bounded_below }
}

/// Result of [`simplex`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Infeasible,
    Unbounded,
    Optimal {
        x: Vec<T>,
        value: T,
        /// A dual optimum `y` with `Aᵀy ≤ c` and `bᵀy = value`.
        duals: Vec<T>,
    },
}

struct Tableau<T> {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let pv = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v = v.clone() / pv.clone();
        }
        let prow = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = line[col].clone();
            for (v, p) in line.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule over the columns in `allowed`. `false` when unbounded.
    fn run(&mut self, allowed: &[bool], rows: &[bool]) -> bool {
        let m = self.basis.len();
        let obj = m;
        let rhs = self.t[0].len() - 1;
        loop {
            let Some(col) = (0..rhs).find(|&j| allowed[j] && self.t[obj][j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for r in (0..m).filter(|&r| rows[r]) {
                let a = &self.t[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.t[r][rhs].clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }
}

/// Solves `min cᵀx` subject to `Ax = b`, `x ≥ 0`.
pub fn simplex<T: Scalar>(a: &Matrix<T>, b: &[T], c: &[T]) -> LpOutcome<T> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let sign = if b[i].is_negative() { -T::one() } else { T::one() };
        let mut row = vec![T::zero(); width];
        for j in 0..n {
            row[j] = a[(i, j)].clone() * sign.clone();
        }
        row[n + i] = T::one();
        row[rhs] = b[i].clone() * sign;
        t.push(row);
    }
    // Phase I objective: Σ artificials, expressed in the non-basic columns.
    let mut obj = vec![T::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[rhs] = obj[rhs].clone() - row[rhs].clone();
    }
    t.push(obj);
    let mut tab = Tableau { t, basis: (n..n + m).collect() };
    let all_cols = vec![true; width - 1];
    let mut live_rows = vec![true; m];
    tab.run(&all_cols, &live_rows);
    if !tab.t[m][rhs].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis; rows where that fails are redundant.
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        match (0..n).find(|&j| !tab.t[r][j].is_zero()) {
            Some(j) => tab.pivot(r, j),
            None => live_rows[r] = false,
        }
    }
    // Phase II objective row: c_j − c_Bᵀ B⁻¹ A_j.
    let mut obj = vec![T::zero(); width];
    obj[..n].clone_from_slice(c);
    for r in (0..m).filter(|&r| live_rows[r]) {
        let cb = c[tab.basis[r]].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..width {
            obj[j] = obj[j].clone() - cb.clone() * tab.t[r][j].clone();
        }
    }
    tab.t[m] = obj;
    let mut allowed = vec![false; width - 1];
    allowed[..n].fill(true);
    if !tab.run(&allowed, &live_rows) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for r in (0..m).filter(|&r| live_rows[r]) {
        x[tab.basis[r]] = tab.t[r][rhs].clone();
    }
    let value = x.iter().zip(c).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());

    // Duals from Bᵀy = c_B on the surviving rows.
    let live: Vec<usize> = (0..m).filter(|&r| live_rows[r]).collect();
    let k = live.len();
    let bt = Matrix::from_fn(k, k, |i, j| a[(live[j], tab.basis[live[i]])].clone());
    let cb: Vec<T> = live.iter().map(|&r| c[tab.basis[r]].clone()).collect();
    let mut duals = vec![T::zero(); m];
    if k > 0 {
        let inv = bt.inverse().expect("optimal basis is nonsingular");
        for (i, yi) in inv.mul_vec(&cb).into_iter().enumerate() {
            duals[live[i]] = yi;
        }
    }
    LpOutcome::Optimal { x, value, duals }
}

/// Which solver [`lexmin`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    FourierMotzkin,
    Simplex,
    /// Fourier–Motzkin up to [`FM_MAX_VARS`] variables, simplex above.
    Auto,
}

pub const FM_MAX_VARS: usize = 4;

/// Lexicographic minimisation over `{x : a_i·x ≥ b_i}` with the tie-breaking
/// rule of [`fourier_motzkin`]; both backends return the same point.
pub fn lexmin<T: Scalar>(system: &[Inequality<T>], nvars: usize, backend: Backend) -> LexMin<T> {
    let use_fm = match backend {
        Backend::FourierMotzkin => true,
        Backend::Simplex => false,
        Backend::Auto => nvars <= FM_MAX_VARS,
    };
    if use_fm {
        fourier_motzkin(system, nvars)
    } else {
        simplex_lexmin(system, nvars)
    }
}

/// Variables `x = u − w` with `u, w ≥ 0`, one surplus per inequality, and one
/// equality per coordinate already fixed.
fn simplex_lexmin<T: Scalar>(system: &[Inequality<T>], nvars: usize) -> LexMin<T> {
    let m = system.len();
    let mut fixed: Vec<T> = Vec::with_capacity(nvars);
    let mut bounded_below = Vec::with_capacity(nvars);
    let solve = |fixed: &[T], k: usize, sign: T| -> LpOutcome<T> {
        let rows = m + fixed.len();
        let cols = 2 * nvars + m;
        let mut a = Matrix::<T>::zeros(rows, cols);
        let mut b = Vec::with_capacity(rows);
        for (i, c) in system.iter().enumerate() {
            for j in 0..nvars {
                a[(i, j)] = c.coeffs[j].clone();
                a[(i, nvars + j)] = -c.coeffs[j].clone();
            }
            a[(i, 2 * nvars + i)] = -T::one();
            b.push(c.rhs.clone());
        }
        for (j, v) in fixed.iter().enumerate() {
            a[(m + j, j)] = T::one();
            a[(m + j, nvars + j)] = -T::one();
            b.push(v.clone());
        }
        let mut cost = vec![T::zero(); cols];
        cost[k] = sign.clone();
        cost[nvars + k] = -sign;
        simplex(&a, &b, &cost)
    };
    if nvars == 0 {
        return match solve(&[], 0, T::zero()) {
            LpOutcome::Infeasible => LexMin::Infeasible,
            _ => LexMin::Feasible { point: Vec::new(), bounded_below: Vec::new() },
        };
    }
    for k in 0..nvars {
        let value = match solve(&fixed, k, T::one()) {
            LpOutcome::Infeasible => return LexMin::Infeasible,
            LpOutcome::Optimal { value, .. } => {
                bounded_below.push(true);
                value
            }
            LpOutcome::Unbounded => {
                bounded_below.push(false);
                match solve(&fixed, k, -T::one()) {
                    LpOutcome::Optimal { value, .. } if value.is_positive() => -value,
                    LpOutcome::Infeasible => return LexMin::Infeasible,
                    _ => T::zero(),
                }
            }
        };
        fixed.push(value);
    }
    LexMin::Feasible { point: fixed, bounded_below }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ineq(c: &[i64], r: (i64, i64)) -> Inequality<BigRational> {
        Inequality::new(c.iter().map(|&v| q(v, 1)).collect(), q(r.0, r.1))
    }

    #[test]
    fn fm_min_max_of_lines() {
        // min s s.t. s ≥ −2ξ − 1, s ≥ ξ − 1, s ≥ 4ξ.
        let sys = vec![ineq(&[1, 2], (-1, 1)), ineq(&[1, -1], (-1, 1)), ineq(&[1, -4], (0, 1))];
        match fourier_motzkin(&sys, 2) {
            LexMin::Feasible { point, bounded_below } => {
                assert_eq!(point, vec![q(-2, 3), q(-1, 6)]);
                assert_eq!(bounded_below, vec![true, true]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fm_detects_infeasibility_and_unboundedness() {
        let sys = vec![ineq(&[1], (1, 1)), ineq(&[-1], (0, 1))];
        assert_eq!(fourier_motzkin(&sys, 1), LexMin::Infeasible);
        // s ≥ ξ, s ≥ 2ξ: s unbounded below.
        let sys = vec![ineq(&[1, -1], (0, 1)), ineq(&[1, -2], (0, 1))];
        match fourier_motzkin(&sys, 2) {
            LexMin::Feasible { bounded_below, .. } => assert!(!bounded_below[0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_small_problem() {
        // min −x − y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let a =
            Matrix::from_rows(vec![vec![q(1, 1), q(2, 1), q(1, 1), q(0, 1)], vec![q(3, 1), q(1, 1), q(0, 1), q(1, 1)]])
                .unwrap();
        let b = vec![q(4, 1), q(6, 1)];
        let c = vec![q(-1, 1), q(-1, 1), q(0, 1), q(0, 1)];
        match simplex(&a, &b, &c) {
            LpOutcome::Optimal { x, value, duals } => {
                assert_eq!(value, q(-14, 5));
                assert_eq!(&x[..2], &[q(8, 5), q(6, 5)]);
                let dual_value = duals.iter().zip(&b).fold(q(0, 1), |acc, (y, bi)| acc + y * bi);
                assert_eq!(dual_value, value);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_infeasible_unbounded_and_redundant() {
        let a = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)]]).unwrap();
        assert_eq!(simplex(&a, &[q(-1, 1)], &[q(0, 1), q(0, 1)]), LpOutcome::Infeasible);
        assert_eq!(simplex(&a.clone(), &[q(1, 1)], &[q(0, 1), q(0, 1)]).clone(), {
            match simplex(&a, &[q(1, 1)], &[q(0, 1), q(0, 1)]) {
                o @ LpOutcome::Optimal { .. } => o,
                o => panic!("{o:?}"),
            }
        });
        let a = Matrix::from_rows(vec![vec![q(1, 1), q(-1, 1)]]).unwrap();
        assert_eq!(simplex(&a, &[q(0, 1)], &[q(-1, 1), q(0, 1)]), LpOutcome::Unbounded);
        // Duplicate row.
        let a = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]]).unwrap();
        match simplex(&a, &[q(1, 1), q(2, 1)], &[q(1, 1), q(3, 1)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 1)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn float_instantiation() {
        let sys = vec![
            Inequality::new(vec![1.0_f64, 2.0], -1.0),
            Inequality::new(vec![1.0, -1.0], -1.0),
            Inequality::new(vec![1.0, -4.0], 0.0),
        ];
        match fourier_motzkin(&sys, 2) {
            LexMin::Feasible { point, .. } => {
                assert!((point[0] + 2.0 / 3.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    proptest::proptest! {
        #[test]
        fn backends_agree(
            rows in proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), -4i64..=4), 1..7)
        ) {
            let sys: Vec<Inequality<BigRational>> =
                rows.iter().map(|(c, r)| ineq(c, (*r, 1))).collect();
            proptest::prop_assert_eq!(
                lexmin(&sys, 3, Backend::FourierMotzkin),
                lexmin(&sys, 3, Backend::Simplex)
            );
            if let LexMin::Feasible { point, .. } = fourier_motzkin(&sys, 3) {
                for c in &sys {
                    let lhs = c.coeffs.iter().zip(&point).fold(q(0, 1), |acc, (a, x)| acc + a * x);
                    proptest::prop_assert!(lhs >= c.rhs);
                }
            }
        }
    }
}
