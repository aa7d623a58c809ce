use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::MatrixQ;

use super::BoundsError;

/// Largest tensor space [`perm_invariant_check`] accepts.
pub const MAX_TENSOR_DIM: usize = 4096;
const FULL_BASIS_DIM: usize = 256;
const PROBES: usize = 4;

/// A permutation of `0..n`, stored as its list of images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, BoundsError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(BoundsError::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// From the images of `1..=n`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, BoundsError> {
        let zero_based = images
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| BoundsError::InvalidPermutation(format!("{images:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::new(zero_based)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = BoundsError;

    fn try_from(v: Vec<usize>) -> Result<Self, BoundsError> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

/// One permutation `σ_i ∈ S_{a_i}` per tensor factor `E_i^{⊗ a_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermSpec {
    pub arities: Vec<usize>,
    pub permutations: Vec<Permutation>,
}

impl PermSpec {
    pub fn new(arities: Vec<usize>, permutations: Vec<Permutation>) -> Result<Self, BoundsError> {
        if arities.len() != permutations.len() || arities.iter().zip(&permutations).any(|(a, p)| *a != p.len()) {
            return Err(BoundsError::InvalidPermutation("arities and permutations disagree".into()));
        }
        Ok(PermSpec { arities, permutations })
    }

    fn inverse(&self) -> PermSpec {
        PermSpec {
            arities: self.arities.clone(),
            permutations: self.permutations.iter().map(Permutation::inverse).collect(),
        }
    }
}

/// Mixed-radix layout of `⊗_i (C^{d_i})^{⊗ a_i}`: one slot per tensor factor.
struct Layout {
    radix: Vec<usize>,
    dim: usize,
}

impl Layout {
    fn new(spec: &PermSpec, dims: &[usize]) -> Result<Self, BoundsError> {
        if dims.len() != spec.arities.len() || dims.contains(&0) {
            return Err(BoundsError::InvalidPermutation("dims must be positive, one per factor".into()));
        }
        let radix: Vec<usize> = spec.arities.iter().zip(dims).flat_map(|(&a, &d)| std::iter::repeat_n(d, a)).collect();
        let dim = radix.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128)).unwrap_or(u128::MAX);
        if dim > MAX_TENSOR_DIM as u128 {
            return Err(BoundsError::DimensionTooLarge(dim));
        }
        Ok(Layout { radix, dim: dim as usize })
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.radix.len()];
        for (slot, r) in d.iter_mut().zip(&self.radix).rev() {
            *slot = idx % r;
            idx /= r;
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.radix).fold(0, |acc, (&x, &r)| acc * r + x)
    }

    /// `ε_σ` on basis indices: the factor in slot `k` of group `i` moves to
    /// slot `σ_i(k)`.
    fn permute(&self, spec: &PermSpec, idx: usize) -> usize {
        let src = self.digits(idx);
        let mut dst = src.clone();
        let mut offset = 0;
        for (a, sigma) in spec.arities.iter().zip(&spec.permutations) {
            for k in 0..*a {
                dst[offset + sigma.apply(k)] = src[offset + k];
            }
            offset += a;
        }
        self.index(&dst)
    }

    /// `g_1^{⊗a_1} ⊗ ⋯ ⊗ g_N^{⊗a_N}` applied to a vector.
    fn apply_group(&self, slot_mats: &[&MatrixQ], v: &[BigRational]) -> Vec<BigRational> {
        let mut cur = v.to_vec();
        let mut stride = 1;
        for slot in (0..self.radix.len()).rev() {
            let d = self.radix[slot];
            let g = slot_mats[slot];
            let mut next = vec![BigRational::zero(); self.dim];
            for (idx, out) in next.iter_mut().enumerate() {
                let digit = (idx / stride) % d;
                let base = idx - digit * stride;
                let mut acc = BigRational::zero();
                for k in 0..d {
                    let c = &g[(digit, k)];
                    if !c.is_zero() {
                        acc += c * &cur[base + k * stride];
                    }
                }
                *out = acc;
            }
            cur = next;
            stride *= d;
        }
        cur
    }
}

fn random_sl(d: usize, rng: &mut ChaCha8Rng) -> MatrixQ {
    let mut g = MatrixQ::identity(d);
    if d < 2 {
        return g;
    }
    for _ in 0..rng.gen_range(1..=4) {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let c = BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
        let mut s = MatrixQ::identity(d);
        s[(i, j)] = c;
        g = s.mul(&g);
    }
    g
}

/// Entry `φ_{R,S}` of a pseudo-random integer endomorphism, drawn lazily at a
/// fixed position of a seeded ChaCha stream.
fn phi_entry(seed: u64, dim: usize, r: usize, s: usize) -> i64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos((r as u128 * dim as u128 + s as u128) * 2);
    i64::from(rng.next_u32() % 7) - 3
}

/// Checks that `ε_σ` commutes with `g_1^{⊗a_1} ⊗ ⋯ ⊗ g_N^{⊗a_N}` for `trials`
/// random `g_i ∈ SL_{d_i}(Q)`, exactly, and the trace pairing
/// `Σ_{R,S} (ε_σ)_{RS} φ_{RS} = Tr(φ ∘ ε_{σ⁻¹})` on `trials` random integer `φ`.
///
/// Commutation is tested on every basis vector up to dimension 256 and on
/// random integer probe vectors above.
pub fn perm_invariant_check(spec: &PermSpec, dims: &[usize], trials: usize, seed: u64) -> Result<bool, BoundsError> {
    let layout = Layout::new(spec, dims)?;
    let dim = layout.dim;
    let perm: Vec<usize> = (0..dim).map(|i| layout.permute(spec, i)).collect();
    let inv_spec = spec.inverse();
    let perm_inv: Vec<usize> = (0..dim).map(|i| layout.permute(&inv_spec, i)).collect();
    let apply_perm = |v: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); dim];
        for (i, x) in v.iter().enumerate() {
            out[perm[i]] = x.clone();
        }
        out
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let gs: Vec<MatrixQ> = dims.iter().map(|&d| random_sl(d, &mut rng)).collect();
        let slot_mats: Vec<&MatrixQ> =
            spec.arities.iter().zip(&gs).flat_map(|(&a, g)| std::iter::repeat_n(g, a)).collect();
        let probes: Vec<Vec<BigRational>> = if dim <= FULL_BASIS_DIM {
            (0..dim)
                .map(|i| {
                    let mut e = vec![BigRational::zero(); dim];
                    e[i] = BigRational::from_integer(1.into());
                    e
                })
                .collect()
        } else {
            (0..PROBES)
                .map(|_| (0..dim).map(|_| BigRational::from_integer(rng.gen_range(-5i64..=5).into())).collect())
                .collect()
        };
        for v in probes {
            if layout.apply_group(&slot_mats, &apply_perm(&v)) != apply_perm(&layout.apply_group(&slot_mats, &v)) {
                return Ok(false);
            }
        }
    }

    for t in 0..trials {
        let phi_seed = seed.wrapping_add(t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let pairing: i64 = (0..dim).map(|s| phi_entry(phi_seed, dim, perm[s], s)).sum();
        // Tr(φ ∘ ε_{σ⁻¹}) = Σ_R φ(R, ε_{σ⁻¹}(R)) since ε_{σ⁻¹} sends x_R to x_{σ⁻¹R}.
        let trace: i64 = (0..dim).map(|r| phi_entry(phi_seed, dim, r, perm_inv[r])).sum();
        if pairing != trace {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Tr(ε_σ ∘ ε_{σ⁻¹})`, which equals the dimension of the tensor space.
pub fn self_pairing(spec: &PermSpec, dims: &[usize]) -> Result<usize, BoundsError> {
    let layout = Layout::new(spec, dims)?;
    let inv = spec.inverse();
    Ok((0..layout.dim).filter(|&r| layout.permute(spec, layout.permute(&inv, r)) == r).count())
}
