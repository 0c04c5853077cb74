//! Kronecker shuffles, the faux product and joint nilpotency.

use crate::error::{NcError, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// The permutation `E(n1, n2) = [E_ij^T]` with `E_ij ∈ K^{n1×n2}`.
///
/// It maps a vector laid out as `n2` outer blocks of length `n1` to the
/// layout with `n1` outer blocks of length `n2`. Consequently, for `Q` of
/// shape `n1×n2` and `P` of shape `n3×n4`,
/// `P ⊗ Q = E(n3, n1) (Q ⊗ P) E(n4, n2)^T`.
pub fn shuffle_matrix<T: Field>(n1: usize, n2: usize) -> Matrix<T> {
    let n = n1 * n2;
    let mut e = Matrix::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n2 {
            // block (i, j) has size n2×n1 and equals E_ij^T: a single one at (j, i)
            e.set(i * n2 + j, j * n1 + i, T::one());
        }
    }
    e
}

/// Rewrites `Σ_ij E_ij ⊗ M_ij` (grid outer, blocks inner) in the layout
/// `Σ_ij M_ij ⊗ E_ij`, where the grid is `a×b` and the blocks `n×n'`.
pub fn grid_to_inner<T: Field>(grid: &Matrix<T>, a: usize, b: usize, n: usize, n2: usize) -> Matrix<T> {
    &(&shuffle_matrix::<T>(n, a) * grid) * &shuffle_matrix::<T>(n2, b).transpose()
}

/// Inverse of [`grid_to_inner`].
pub fn inner_to_grid<T: Field>(m: &Matrix<T>, a: usize, b: usize, n: usize, n2: usize) -> Matrix<T> {
    &(&shuffle_matrix::<T>(n, a).transpose() * m) * &shuffle_matrix::<T>(n2, b)
}

/// An `m×m` block matrix whose entries live in the degree-`deg` tensor power
/// of `K^{s×s}`, each stored as an `s^deg × s^deg` Kronecker product.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBlocks<T> {
    pub m: usize,
    pub s: usize,
    pub degree: usize,
    pub entries: Vec<Matrix<T>>,
}

impl<T: Field> TensorBlocks<T> {
    /// Splits an `sm×sm` matrix into its `m×m` grid of `s×s` blocks (degree 1).
    pub fn from_matrix(x: &Matrix<T>, s: usize) -> Result<Self> {
        if !x.is_square() || s == 0 || x.rows() % s != 0 {
            return Err(NcError::Dimension(format!("{:?} is not a square multiple of {s}", x.shape())));
        }
        let m = x.rows() / s;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(x.block(i * s, j * s, s, s));
            }
        }
        Ok(TensorBlocks { m, s, degree: 1, entries })
    }

    pub fn entry(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.entries[i * self.m + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Faux product: entry `(i, j)` is `Σ_k P_ik ⊗ Q_kj`.
    pub fn faux(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.s != other.s {
            return Err(NcError::Dimension("faux product block structure mismatch".into()));
        }
        let m = self.m;
        let sz = self.s.pow((self.degree + other.degree) as u32);
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Matrix::zeros(sz, sz);
                for k in 0..m {
                    acc = acc + self.entry(i, k).kron(other.entry(k, j));
                }
                entries.push(acc);
            }
        }
        Ok(TensorBlocks { m, s: self.s, degree: self.degree + other.degree, entries })
    }
}

/// `X^{⊙ω}` for a nonempty word `ω` (letters are 0-based variable indices).
pub fn word_faux_power<T: Field>(xs: &[Matrix<T>], word: &[usize], s: usize) -> Result<TensorBlocks<T>> {
    let (&first, rest) = word
        .split_first()
        .ok_or_else(|| NcError::Dimension("faux power of the empty word".into()))?;
    let mut acc = TensorBlocks::from_matrix(&xs[first], s)?;
    for &l in rest {
        acc = acc.faux(&TensorBlocks::from_matrix(&xs[l], s)?)?;
    }
    Ok(acc)
}

/// Whether every product of length `κ = m·s` (the common matrix size) of the
/// `Z_k` vanishes. Decided by the chain `V_0 = K^n`, `V_{t+1} = Σ_k Z_k V_t`.
pub fn is_jointly_nilpotent<T: Field>(zs: &[Matrix<T>], s: usize) -> Result<bool> {
    let Some(first) = zs.first() else { return Ok(true) };
    let n = first.rows();
    if zs.iter().any(|z| z.shape() != (n, n)) || s == 0 || n % s != 0 {
        return Err(NcError::Dimension("nilpotency test needs equal square sizes divisible by s".into()));
    }
    let mut v = Subspace::<T>::full(n);
    for _ in 0..n {
        if v.dim() == 0 {
            return Ok(true);
        }
        let parts: Vec<Matrix<T>> = zs.iter().map(|z| z * v.basis()).collect();
        let refs: Vec<&Matrix<T>> = parts.iter().collect();
        v = Subspace::span(&Matrix::hstack(n, &refs));
    }
    Ok(v.dim() == 0)
}
