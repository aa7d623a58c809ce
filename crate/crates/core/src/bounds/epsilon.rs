use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::matrix::{Matrix, MatrixQ};

use super::BoundsError;

/// Sparse `±1` matrix of `ε_w` in orthonormal tensor bases.
///
/// * `w = 2`: `W^{⊗2} → End(W) ⊗ det W`, columns indexed by `x_a ⊗ x_b`
///   (index `2a + b`), rows by `A_ij`, the endomorphism `x_i ↦ x_j`
///   (index `2i + j`).
/// * `w ≥ 3`: `W^{⊗w} → W^{⊗w} ⊗ W^{∨⊗w} ⊗ det W`, `x_R ↦ Σ_γ sign(γ) x_R ⊗ x_γ^∨`;
///   row `(R, S)` has index `idx(R) · w^w + idx(S)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonMap {
    pub w: usize,
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, sign)`.
    pub entries: Vec<(usize, usize, i8)>,
}

fn tuple_index(t: &[usize], w: usize) -> usize {
    t.iter().fold(0, |acc, &r| acc * w + r)
}

#[cfg(test)]
fn tuple_of(mut idx: usize, w: usize) -> Vec<usize> {
    let mut t = vec![0; w];
    for slot in t.iter_mut().rev() {
        *slot = idx % w;
        idx /= w;
    }
    t
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub(crate) fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

pub fn epsilon_map(w: usize) -> Result<EpsilonMap, BoundsError> {
    if !(2..=4).contains(&w) {
        return Err(BoundsError::UnsupportedSize(w));
    }
    if w == 2 {
        // Inverse: A_0j ↦ x_j ⊗ x_1, A_1j ↦ −x_j ⊗ x_0, a signed permutation;
        // ε is its transpose.
        let mut entries = Vec::with_capacity(4);
        for j in 0..2 {
            entries.push((j, 2 * j + 1, 1));
            entries.push((2 + j, 2 * j, -1));
        }
        entries.sort();
        return Ok(EpsilonMap { w, rows: 4, cols: 4, entries });
    }
    let dim = w.pow(w as u32);
    let perms = permutations_with_sign(w);
    let mut entries = Vec::with_capacity(dim * perms.len());
    for r in 0..dim {
        for (gamma, sign) in &perms {
            entries.push((r * dim + tuple_index(gamma, w), r, *sign));
        }
    }
    Ok(EpsilonMap { w, rows: dim * dim, cols: dim, entries })
}

impl EpsilonMap {
    /// Dense exact matrix; only sensible for `w ≤ 3`.
    pub fn to_dense(&self) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.rows, self.cols);
        for &(r, c, s) in &self.entries {
            m[(r, c)] = BigRational::from_integer(i64::from(s).into());
        }
        m
    }

    /// Exact Gram matrix `εᵀε`.
    pub fn gram(&self) -> MatrixQ {
        let mut by_row: Vec<(usize, usize, i8)> = self.entries.clone();
        by_row.sort();
        let mut g = vec![vec![0i64; self.cols]; self.cols];
        let mut start = 0;
        while start < by_row.len() {
            let row = by_row[start].0;
            let end = by_row[start..].iter().position(|e| e.0 != row).map_or(by_row.len(), |k| start + k);
            for a in &by_row[start..end] {
                for b in &by_row[start..end] {
                    g[a.1][b.1] += i64::from(a.2) * i64::from(b.2);
                }
            }
            start = end;
        }
        Matrix::from_fn(self.cols, self.cols, |i, j| BigRational::from_integer(g[i][j].into()))
    }

    /// Image of the basis tensor `x_R` as `(row, sign)` pairs.
    pub fn column(&self, col: usize) -> Vec<(usize, i8)> {
        self.entries.iter().filter(|e| e.1 == col).map(|e| (e.0, e.2)).collect()
    }
}

/// The inverse of `ε_2`, computed from `φ ⊗ (x_0 ∧ x_1) ↦ φ(x_0) ⊗ x_1 − φ(x_1) ⊗ x_0`.
pub fn epsilon_inverse_w2() -> MatrixQ {
    let mut m = MatrixQ::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            // A_ij(x_k) = δ_ik x_j.
            let apply = |k: usize| -> Option<usize> { (k == i).then_some(j) };
            let col = 2 * i + j;
            if let Some(img) = apply(0) {
                m[(tuple_index(&[img, 1], 2), col)] += BigRational::one();
            }
            if let Some(img) = apply(1) {
                m[(tuple_index(&[img, 0], 2), col)] -= BigRational::one();
            }
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormCheck {
    pub w: usize,
    pub norm: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Operator norm of `ε_w` by power iteration on the Gram matrix, against the
/// bound `√(w!)`.
pub fn epsilon_norm_check(w: usize) -> Result<NormCheck, BoundsError> {
    let eps = epsilon_map(w)?;
    let g = eps.gram().to_f64();
    let n = g.rows();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64)).collect();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let gv = g.mul_vec(&v);
        let next: f64 = gv.iter().zip(&v).map(|(a, b)| a * b).sum();
        v = gv;
        if (next - lambda).abs() <= 1e-10 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    let norm = lambda.max(0.0).sqrt();
    let factorial: f64 = (1..=w).map(|k| k as f64).product();
    let bound = factorial.sqrt();
    Ok(NormCheck { w, norm, bound, ok: norm <= bound + 1e-8 })
}

#[cfg(test)]
fn is_identity(m: &MatrixQ) -> bool {
    use num_traits::Zero;
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| if i == j { m[(i, j)].is_one() } else { m[(i, j)].is_zero() }))
}
