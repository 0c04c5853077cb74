//! Subspaces of `K^n` represented by a basis matrix, with the lattice
//! operations used by the controllability and observability computations.

use crate::field::Field;
use crate::linalg::{independent_columns, kernel, rank};
use crate::matrix::Matrix;

#[derive(Clone, Debug)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Matrix<T>,
}

impl<T: Field> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Column span of `m`. The stored basis is the set of pivot columns of
    /// `m`, so it is deterministic in the order the columns are supplied.
    pub fn span(m: &Matrix<T>) -> Self {
        let idx = independent_columns(m);
        Subspace { ambient: m.rows(), basis: m.select_columns(&idx) }
    }

    /// Span with a canonical basis (reduced column echelon form), independent
    /// of how the spanning set was produced.
    pub fn canonical(&self) -> Self {
        if self.dim() == 0 {
            return self.clone();
        }
        let (r, piv) = crate::linalg::rref(&self.basis.transpose());
        let rows: Vec<usize> = (0..piv.len()).collect();
        Subspace { ambient: self.ambient, basis: r.select_rows(&rows).transpose() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn contains_vec(&self, v: &Matrix<T>) -> bool {
        let m = Matrix::hstack(self.ambient, &[&self.basis, v]);
        rank(&m) == self.dim()
    }

    pub fn contains(&self, other: &Self) -> bool {
        assert_eq!(self.ambient, other.ambient, "subspace ambient mismatch");
        let m = Matrix::hstack(self.ambient, &[&self.basis, &other.basis]);
        rank(&m) == self.dim()
    }

    /// Equality as sets (mutual containment), not basis identity.
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.contains(other)
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "subspace ambient mismatch");
        Self::span(&Matrix::hstack(self.ambient, &[&self.basis, &other.basis]))
    }

    /// Intersection via the kernel of `[U | -V]`.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "subspace ambient mismatch");
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient);
        }
        let m = Matrix::hstack(self.ambient, &[&self.basis, &(-&other.basis)]);
        let k = kernel(&m);
        let coeff = k.block(0, 0, self.dim(), k.cols());
        Self::span(&(&self.basis * &coeff))
    }

    /// `{v : A v ∈ self}` via the kernel of `[A | -basis]`, projected onto the
    /// first block.
    pub fn preimage(&self, a: &Matrix<T>) -> Self {
        assert_eq!(a.rows(), self.ambient, "preimage shape mismatch");
        let n = a.cols();
        let m = Matrix::hstack(self.ambient, &[a, &(-&self.basis)]);
        let k = kernel(&m);
        Self::span(&k.block(0, 0, n, k.cols()))
    }

    /// Image `A·self`.
    pub fn image(&self, a: &Matrix<T>) -> Self {
        Self::span(&(a * &self.basis))
    }

    /// Extends `self` to a basis of `within`, adding vectors from `candidates`
    /// (columns, scanned left to right) that are independent of what has
    /// been collected so far. Returns only the added vectors.
    pub fn complement_from(&self, within: &Self, candidates: &Matrix<T>) -> Matrix<T> {
        let target = within.dim() - self.dim();
        let mut current = self.basis.clone();
        let mut added: Vec<Matrix<T>> = Vec::new();
        let mut r = self.dim();
        for j in 0..candidates.cols() {
            if added.len() == target {
                break;
            }
            let v = candidates.column(j);
            if !within.contains_vec(&v) {
                continue;
            }
            let next = Matrix::hstack(self.ambient, &[&current, &v]);
            let nr = rank(&next);
            if nr > r {
                r = nr;
                current = next;
                added.push(v);
            }
        }
        let refs: Vec<&Matrix<T>> = added.iter().collect();
        Matrix::hstack(self.ambient, &refs)
    }
}

/// A growing set of linearly independent vectors, kept in echelon form so
/// that each membership test costs one reduction pass instead of a full rank
/// computation.
#[derive(Clone, Debug)]
pub struct IncrementalBasis<T> {
    ambient: usize,
    /// Original vectors in insertion order.
    accepted: Vec<Matrix<T>>,
    /// Reduced copies with their pivot index; `reduced[i][pivot] = 1`.
    reduced: Vec<(usize, Vec<T>)>,
}

impl<T: Field> IncrementalBasis<T> {
    pub fn new(ambient: usize) -> Self {
        IncrementalBasis { ambient, accepted: Vec::new(), reduced: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.accepted.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn reduce(&self, v: &Matrix<T>) -> Vec<T> {
        let mut w: Vec<T> = v.data().to_vec();
        for (p, r) in &self.reduced {
            let f = w[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(r) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        w
    }

    /// Whether the column vector `v` lies outside the current span.
    pub fn is_independent(&self, v: &Matrix<T>) -> bool {
        let scale = v.max_magnitude();
        self.reduce(v).iter().any(|x| !x.negligible(scale))
    }

    /// Adds the column vector `v` if it is independent; reports whether it was.
    pub fn insert(&mut self, v: &Matrix<T>) -> bool {
        assert_eq!(v.shape(), (self.ambient, 1), "IncrementalBasis expects column vectors");
        let scale = v.max_magnitude();
        let w = self.reduce(v);
        let pivot = if T::EXACT {
            w.iter().position(|x| !x.is_zero())
        } else {
            (0..w.len())
                .filter(|&i| !w[i].negligible(scale))
                .max_by(|&a, &b| w[a].magnitude().total_cmp(&w[b].magnitude()))
        };
        let Some(p) = pivot else { return false };
        let inv = T::one() / w[p].clone();
        let w: Vec<T> = w.into_iter().map(|x| x * inv.clone()).collect();
        self.reduced.push((p, w));
        self.accepted.push(v.clone());
        true
    }

    /// The accepted vectors as the columns of a matrix.
    pub fn vectors(&self) -> Matrix<T> {
        let refs: Vec<&Matrix<T>> = self.accepted.iter().collect();
        Matrix::hstack(self.ambient, &refs)
    }

    pub fn accepted(&self) -> &[Matrix<T>] {
        &self.accepted
    }

    pub fn into_subspace(self) -> Subspace<T> {
        let basis = self.vectors();
        Subspace { ambient: self.ambient, basis }
    }
}
