//! Dense row-major matrices over any [`Scalar`].

use std::fmt;
use std::ops::{Index, IndexMut};

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::places::{format_rational, parse_rational};
use crate::scalar::{Real, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from rows; `None` if they are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diag(d: &[T]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `Σ a_ij²`.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
    }

    /// Determinant by Gaussian elimination with first-nonzero pivoting.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(piv) = pivot_row(&a, c, c) else {
                return T::zero();
            };
            if piv != c {
                a.swap_rows(piv, c);
                det = -det;
            }
            let pv = a[(c, c)].clone();
            det = det * pv.clone();
            for r in c + 1..n {
                let f = a[(r, c)].clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let d = f.clone() * a[(c, k)].clone();
                    a[(r, k)] = a[(r, k)].clone() - d;
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::<T>::identity(n);
        for c in 0..n {
            let piv = pivot_row(&a, c, c)?;
            a.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let pv = a[(c, c)].clone();
            for k in 0..n {
                a[(c, k)] = a[(c, k)].clone() / pv.clone();
                inv[(c, k)] = inv[(c, k)].clone() / pv.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for k in 0..n {
                    let da = f.clone() * a[(c, k)].clone();
                    a[(r, k)] = a[(r, k)].clone() - da;
                    let di = f.clone() * inv[(c, k)].clone();
                    inv[(r, k)] = inv[(r, k)].clone() - di;
                }
            }
        }
        Some(inv)
    }

    /// Leading principal minors `det(A[..k, ..k])`, `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<T> {
        (1..=self.rows.min(self.cols)).map(|k| Matrix::from_fn(k, k, |i, j| self[(i, j)].clone()).det()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix<T>) -> Matrix<T> {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Matrix::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                other[(i - self.rows, j - self.cols)].clone()
            } else {
                T::zero()
            }
        })
    }
}

fn pivot_row<T: Scalar>(a: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    if T::EXACT {
        (from..a.rows).find(|&r| !a[(r, col)].is_zero())
    } else {
        let best = (from..a.rows)
            .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        (!a[(best, col)].is_zero()).then_some(best)
    }
}

impl<F: Real> Matrix<F> {
    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<F> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let eps = F::epsilon();
        for _sweep in 0..100 {
            let off: F = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            let diag: F = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
            if off <= eps * eps * diag.max(F::min_positive_value()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == F::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (F::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<F> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Largest singular value, from the eigenvalues of `AᵀA`.
    pub fn spectral_norm(&self) -> F {
        let gram = self.transpose().mul(self);
        gram.symmetric_eigenvalues().last().copied().unwrap_or_else(F::zero).max(F::zero()).sqrt()
    }
}

/// Exact rational matrix.
pub type MatrixQ = Matrix<BigRational>;

impl MatrixQ {
    pub fn to_f64(&self) -> Matrix<f64> {
        use num_traits::ToPrimitive;
        self.map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Option<MatrixQ> {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect(),
        )
    }
}

impl Serialize for MatrixQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

/// Row-major array; entries may be rational strings (`"1/2"`) or JSON integers.
impl<'de> Deserialize<'de> for MatrixQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(parse_json_rational).collect::<Result<Vec<_>, String>>())
            .collect::<Result<Vec<_>, String>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(parsed).ok_or_else(|| D::Error::custom("ragged matrix rows"))
    }
}

pub(crate) fn parse_json_rational(v: &serde_json::Value) -> Result<BigRational, String> {
    match v {
        serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        serde_json::Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap().into())),
        other => Err(format!("expected a rational string or integer, got {other}")),
    }
}
