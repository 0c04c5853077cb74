//! Linear maps `K^{s×s} → K^{p×q}` stored by the images of the matrix units.

use crate::error::{NcError, Result};
use crate::field::{Field, Q};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockLinearMap<T> {
    s: usize,
    p: usize,
    q: usize,
    /// `images[i*s + j] = T(E_ij)`.
    images: Vec<Matrix<T>>,
}

impl<T: Field> BlockLinearMap<T> {
    pub fn new(s: usize, p: usize, q: usize, images: Vec<Matrix<T>>) -> Result<Self> {
        if images.len() != s * s || images.iter().any(|m| m.shape() != (p, q)) {
            return Err(NcError::Dimension(format!("map images must be {} matrices of shape {p}×{q}", s * s)));
        }
        Ok(BlockLinearMap { s, p, q, images })
    }

    pub fn zero(s: usize, p: usize, q: usize) -> Self {
        BlockLinearMap { s, p, q, images: vec![Matrix::zeros(p, q); s * s] }
    }

    /// The identity map on `K^{s×s}`.
    pub fn identity(s: usize) -> Self {
        Self::from_fn(s, s, s, |x| x.clone())
    }

    /// The map `X ↦ f(X)`, for `f` linear, recorded on the matrix units.
    pub fn from_fn(s: usize, p: usize, q: usize, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Self {
        let mut images = Vec::with_capacity(s * s);
        for i in 0..s {
            for j in 0..s {
                let img = f(&Matrix::unit(s, s, i, j));
                assert_eq!(img.shape(), (p, q), "from_fn image shape");
                images.push(img);
            }
        }
        BlockLinearMap { s, p, q, images }
    }

    /// The map `X ↦ (I_k ⊗ X)·M`, a common way to write such maps by hand.
    pub fn from_kron_right(s: usize, m: &Matrix<T>) -> Result<Self> {
        if m.rows() % s != 0 {
            return Err(NcError::Dimension("from_kron_right: rows of M not a multiple of s".into()));
        }
        let k = m.rows() / s;
        let q = m.cols();
        Ok(Self::from_fn(s, k * s, q, |x| &Matrix::<T>::identity(k).kron(x) * m))
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn images(&self) -> &[Matrix<T>] {
        &self.images
    }
    pub fn image(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.images[i * self.s + j]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|m| m.is_zero())
    }

    /// `T(X) = Σ x_ij T(E_ij)` for an `s×s` matrix `X`.
    pub fn apply(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.shape() != (self.s, self.s) {
            return Err(NcError::Dimension(format!("map expects {0}×{0}, got {1:?}", self.s, x.shape())));
        }
        let mut out = Matrix::zeros(self.p, self.q);
        for i in 0..self.s {
            for j in 0..self.s {
                let c = x.get(i, j);
                if !c.is_zero() {
                    out = out + self.image(i, j).scale(c);
                }
            }
        }
        Ok(out)
    }

    /// `(X)T`: view `X` (size `sm`) as an `m×m` grid of `s×s` blocks and apply
    /// `T` blockwise, giving a `pm × qm` matrix.
    pub fn apply_blocks(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        let s = self.s;
        if !x.is_square() || x.rows() % s != 0 {
            return Err(NcError::Dimension(format!("size {:?} is not a multiple of s = {s}", x.shape())));
        }
        let m = x.rows() / s;
        let mut out = Matrix::zeros(self.p * m, self.q * m);
        for bi in 0..m {
            for bj in 0..m {
                let blk = x.block(bi * s, bj * s, s, s);
                if blk.is_zero() {
                    continue;
                }
                out.set_block(bi * self.p, bj * self.q, &self.apply(&blk)?);
            }
        }
        Ok(out)
    }

    /// Algebra extension for matrix-based algebras: given the entries `a_ij`
    /// (each `n×n`, row-major over `(i, j)`), returns the flattened value
    /// `Σ T(E_ij) ⊗ a_ij` of size `pn × qn`.
    pub fn apply_tensor(&self, entries: &[Matrix<T>]) -> Result<Matrix<T>> {
        if entries.len() != self.s * self.s {
            return Err(NcError::Dimension("apply_tensor needs s² entries".into()));
        }
        let n = entries[0].rows();
        let mut out = Matrix::zeros(self.p * n, self.q * n);
        for (img, a) in self.images.iter().zip(entries) {
            if a.shape() != (n, n) {
                return Err(NcError::Dimension("algebra entries of unequal size".into()));
            }
            if img.is_zero() || a.is_zero() {
                continue;
            }
            out = out + img.kron(a);
        }
        Ok(out)
    }

    /// `C·T : X ↦ C T(X)`.
    pub fn compose_left(&self, c: &Matrix<T>) -> Result<Self> {
        if c.cols() != self.p {
            return Err(NcError::Dimension("compose_left shape mismatch".into()));
        }
        Ok(BlockLinearMap { s: self.s, p: c.rows(), q: self.q, images: self.images.iter().map(|m| c * m).collect() })
    }

    /// `T·C : X ↦ T(X) C`.
    pub fn compose_right(&self, c: &Matrix<T>) -> Result<Self> {
        if c.rows() != self.q {
            return Err(NcError::Dimension("compose_right shape mismatch".into()));
        }
        Ok(BlockLinearMap { s: self.s, p: self.p, q: c.cols(), images: self.images.iter().map(|m| m * c).collect() })
    }

    pub fn map_images(&self, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Self {
        let images: Vec<Matrix<T>> = self.images.iter().map(f).collect();
        let (p, q) = images.first().map(|m| m.shape()).unwrap_or((self.p, self.q));
        BlockLinearMap { s: self.s, p, q, images }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.s, self.p, self.q) != (other.s, other.p, other.q) {
            return Err(NcError::Dimension("map sum shape mismatch".into()));
        }
        Ok(BlockLinearMap {
            s: self.s,
            p: self.p,
            q: self.q,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_images(|m| -m)
    }

    /// `T*(X) = T(X*)*`, so `T*(E_ij) = T(E_ji)*`.
    pub fn adjoint(&self) -> Self {
        let s = self.s;
        let mut images = Vec::with_capacity(s * s);
        for i in 0..s {
            for j in 0..s {
                images.push(self.image(j, i).adjoint());
            }
        }
        BlockLinearMap { s, p: self.q, q: self.p, images }
    }

    /// `T* = T`, compared on every basis image up to the field's tolerance.
    pub fn is_hermitian(&self) -> bool {
        self.p == self.q && self.adjoint().images.iter().zip(&self.images).all(|(x, y)| x.approx_eq(y))
    }

    /// Assembles a map whose images are block matrices: `grid[r][c]` is the
    /// map giving block `(r, c)`. Row heights and column widths are read off
    /// the first column and first row.
    pub fn grid(grid: &[Vec<&Self>]) -> Result<Self> {
        let s = grid[0][0].s;
        let heights: Vec<usize> = grid.iter().map(|row| row[0].p).collect();
        let widths: Vec<usize> = grid[0].iter().map(|m| m.q).collect();
        for (r, row) in grid.iter().enumerate() {
            for (c, m) in row.iter().enumerate() {
                if m.s != s || m.p != heights[r] || m.q != widths[c] {
                    return Err(NcError::Dimension("inconsistent block grid of maps".into()));
                }
            }
        }
        let p: usize = heights.iter().sum();
        let q: usize = widths.iter().sum();
        let mut images = Vec::with_capacity(s * s);
        for idx in 0..s * s {
            let mut img = Matrix::zeros(p, q);
            let mut r0 = 0;
            for (r, row) in grid.iter().enumerate() {
                let mut c0 = 0;
                for (c, m) in row.iter().enumerate() {
                    img.set_block(r0, c0, &m.images[idx]);
                    c0 += widths[c];
                }
                r0 += heights[r];
            }
            images.push(img);
        }
        Ok(BlockLinearMap { s, p, q, images })
    }

    /// The same map viewed at block size `s·n`: `X ↦ (X)T`.
    pub fn inflate(&self, n: usize) -> Self {
        let sn = self.s * n;
        Self::from_fn(sn, self.p * n, self.q * n, |x| self.apply_blocks(x).expect("inflate: block size"))
    }

    /// Matrix of the map acting on `vec(X)` (row-major vectorisation), with
    /// output `vec(T(X))`; size `pq × s²`.
    pub fn to_matrix(&self) -> Matrix<T> {
        let s2 = self.s * self.s;
        Matrix::from_fn(self.p * self.q, s2, |r, c| self.images[c].data()[r].clone())
    }
}

/// `A^ω(Z_1, …, Z_ℓ) = A_{i1}(Z_1)⋯A_{iℓ}(Z_ℓ)`; the empty word gives `I_L`.
pub fn apply_word<T: Field>(maps: &[BlockLinearMap<T>], word: &[usize], zs: &[Matrix<T>]) -> Result<Matrix<T>> {
    if word.len() != zs.len() {
        return Err(NcError::Dimension(format!("word of length {} with {} arguments", word.len(), zs.len())));
    }
    let l = maps.first().map(|m| m.p).unwrap_or(0);
    let mut acc = Matrix::identity(l);
    for (&k, z) in word.iter().zip(zs) {
        let m = maps.get(k).ok_or_else(|| NcError::Dimension(format!("letter {k} out of range")))?;
        acc = &acc * &m.apply(z)?;
    }
    Ok(acc)
}


impl BlockLinearMap<Q> {
    /// Converts every image to floats.
    pub fn to_f64(&self) -> BlockLinearMap<f64> {
        BlockLinearMap { s: self.s, p: self.p, q: self.q, images: self.images.iter().map(Matrix::to_f64).collect() }
    }
}
