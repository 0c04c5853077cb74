//! Controllability and observability, Kalman reduction to a minimal
//! realization, and the similarity between two minimal realizations.

use crate::error::{NcError, Result};
use crate::field::Field;
use crate::linalg;
use crate::linmap::{apply_word, BlockLinearMap};
use crate::matrix::Matrix;
use crate::realization::FmRealization;
use crate::subspace::{IncrementalBasis, Subspace};
use crate::taylor::{tuple_units, words_up_to};

/// Smallest subspace containing every `Im B_k(E_ij)` and invariant under
/// every `A_k(E_ij)`. Computed as a Krylov closure: each newly found
/// independent vector is pushed through all `A_k(E_ij)`.
pub fn controllability_space<T: Field>(a: &[BlockLinearMap<T>], b: &[BlockLinearMap<T>]) -> Subspace<T> {
    let l = b.first().map(|m| m.p()).unwrap_or(0);
    let mut basis = IncrementalBasis::new(l);
    let mut queue = Vec::new();
    for m in b {
        for img in m.images() {
            for u in 0..img.cols() {
                let v = img.column(u);
                if basis.insert(&v) {
                    queue.push(v);
                }
            }
        }
    }
    closure(a, basis, queue, |x, v| x * v).into_subspace()
}

fn closure<T: Field>(
    a: &[BlockLinearMap<T>],
    mut basis: IncrementalBasis<T>,
    mut queue: Vec<Matrix<T>>,
    act: impl Fn(&Matrix<T>, &Matrix<T>) -> Matrix<T>,
) -> IncrementalBasis<T> {
    let mut head = 0;
    while head < queue.len() && !basis.is_full() {
        let v = queue[head].clone();
        head += 1;
        for m in a {
            for img in m.images() {
                let w = act(img, &v);
                if basis.insert(&w) {
                    queue.push(w);
                }
            }
        }
    }
    basis
}

/// Largest subspace contained in `ker C` and invariant under every
/// `A_k(E_ij)`: the common kernel of all `C A^ω(Z)`. The row space of the
/// observability matrix is built as the closure of the rows of `C` under
/// right multiplication by the `A_k(E_ij)`, and the result is its null space.
pub fn unobservable_space<T: Field>(c: &Matrix<T>, a: &[BlockLinearMap<T>]) -> Subspace<T> {
    let l = c.cols();
    let mut basis = IncrementalBasis::new(l);
    let mut queue = Vec::new();
    for i in 0..c.rows() {
        let v = Matrix::from_fn(l, 1, |r, _| c.get(i, r).clone());
        if basis.insert(&v) {
            queue.push(v);
        }
    }
    // Row vector v^T times A is (A^T v)^T.
    let rows = closure(a, basis, queue, |x, v| &x.transpose() * v);
    let obs = rows.vectors().transpose();
    if obs.rows() == 0 {
        return Subspace::full(l);
    }
    Subspace::span(&linalg::kernel(&obs))
}

/// Generator block `A^ω(Z_1..Z_ℓ) B_k(Z_{ℓ+1})` for the combined word
/// `w = ω g_k` on the basis tuple with flat index `tuple`.
pub fn generator_block<T: Field>(
    a: &[BlockLinearMap<T>],
    b: &[BlockLinearMap<T>],
    w: &[usize],
    tuple: usize,
) -> Result<Matrix<T>> {
    let (&k, head) = w.split_last().ok_or_else(|| NcError::Dimension("generator word must be nonempty".into()))?;
    let s = b[k].s();
    let units = tuple_units(s, w.len(), tuple);
    let zs: Vec<Matrix<T>> = units.iter().map(|&(i, j)| Matrix::unit(s, s, i, j)).collect();
    let aw = if head.is_empty() {
        Matrix::identity(b[k].p())
    } else {
        apply_word(a, head, &zs[..head.len()])?
    };
    Ok(&aw * b[k].image(units[head.len()].0, units[head.len()].1))
}

/// Combined words of exactly `len` letters in lexicographic order.
fn words_of_length(d: usize, len: usize) -> Vec<Vec<usize>> {
    words_up_to(d, len).into_iter().filter(|w| w.len() == len).collect()
}

/// Selects `L` independent controllability generators of `(a1, b1)` in
/// canonical order (combined word, basis tuple, column) and returns them as
/// the columns of `G1`, together with the generators of `(a2, b2)` at the
/// same positions as `G2`. Returns `None` when the generators of the first
/// pair do not span `K^L`. Enumeration stops as soon as `L` columns are found
/// or a whole word length adds nothing new.
pub fn paired_generators<T: Field>(
    a1: &[BlockLinearMap<T>],
    b1: &[BlockLinearMap<T>],
    a2: &[BlockLinearMap<T>],
    b2: &[BlockLinearMap<T>],
    l: usize,
) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
    let d = b1.len();
    let s = b1.first().map(|m| m.s()).unwrap_or(1);
    let q = b1.first().map(|m| m.q()).unwrap_or(0);
    let p2 = b2.first().map(|m| m.p()).unwrap_or(0);
    let mut basis = IncrementalBasis::new(l);
    let mut targets: Vec<Matrix<T>> = Vec::new();
    if l == 0 {
        return Ok(Some((Matrix::zeros(0, 0), Matrix::zeros(p2, 0))));
    }
    'levels: for len in 1..=l {
        let before = basis.dim();
        for w in words_of_length(d, len) {
            for t in 0..(s * s).pow(len as u32) {
                let g1 = generator_block(a1, b1, &w, t)?;
                if g1.is_zero() {
                    continue;
                }
                let g2 = generator_block(a2, b2, &w, t)?;
                for u in 0..q {
                    if basis.insert(&g1.column(u)) {
                        targets.push(g2.column(u));
                        if basis.is_full() {
                            break 'levels;
                        }
                    }
                }
            }
        }
        if basis.dim() == before {
            break;
        }
    }
    if !basis.is_full() {
        return Ok(None);
    }
    let refs: Vec<&Matrix<T>> = targets.iter().collect();
    Ok(Some((basis.vectors(), Matrix::hstack(p2, &refs))))
}

/// Truncated controllability matrix: the blocks `A^ω(..) B_k(..)` for all
/// `|ω| ≤ ell_max`, combined words in length-then-lexicographic order and
/// basis tuples in their flat order. The width grows like `(d s²)^ell_max`.
pub fn controllability_matrix<T: Field>(
    a: &[BlockLinearMap<T>],
    b: &[BlockLinearMap<T>],
    ell_max: usize,
) -> Result<Matrix<T>> {
    let d = b.len();
    let l = b.first().map(|m| m.p()).unwrap_or(0);
    let s = b.first().map(|m| m.s()).unwrap_or(1);
    let mut blocks = Vec::new();
    for len in 1..=ell_max + 1 {
        for w in words_of_length(d, len) {
            for t in 0..(s * s).pow(len as u32) {
                blocks.push(generator_block(a, b, &w, t)?);
            }
        }
    }
    let refs: Vec<&Matrix<T>> = blocks.iter().collect();
    Ok(Matrix::hstack(l, &refs))
}

/// Truncated observability matrix: the blocks `C A^ω(..)` for `|ω| ≤ ell_max`
/// stacked vertically in the same canonical order.
pub fn observability_matrix<T: Field>(c: &Matrix<T>, a: &[BlockLinearMap<T>], ell_max: usize) -> Result<Matrix<T>> {
    let d = a.len();
    let s = a.first().map(|m| m.s()).unwrap_or(1);
    let mut blocks = Vec::new();
    for w in words_up_to(d, ell_max) {
        for t in 0..(s * s).pow(w.len() as u32) {
            let zs: Vec<Matrix<T>> =
                tuple_units(s, w.len(), t).into_iter().map(|(i, j)| Matrix::unit(s, s, i, j)).collect();
            blocks.push(c * &apply_word(a, &w, &zs)?);
        }
    }
    let refs: Vec<&Matrix<T>> = blocks.iter().collect();
    Ok(Matrix::vstack(c.cols(), &refs))
}

pub fn is_controllable<T: Field>(r: &FmRealization<T>) -> bool {
    controllability_space(r.a(), r.b()).dim() == r.l()
}

pub fn is_observable<T: Field>(r: &FmRealization<T>) -> bool {
    unobservable_space(r.c(), r.a()).dim() == 0
}

/// Minimal if and only if controllable and observable.
pub fn is_minimal<T: Field>(r: &FmRealization<T>) -> bool {
    is_controllable(r) && is_observable(r)
}

/// Dimensions and basis change of a Kalman reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct KalmanReport<T> {
    pub original_l: usize,
    pub dim_c: usize,
    pub dim_no: usize,
    pub dim_intersection: usize,
    pub reduced_l: usize,
    /// Columns ordered as `H2, H1, H4, H3`.
    pub basis_change: Matrix<T>,
}

/// Kalman decomposition `K^L = H2 ∔ H1 ∔ H4 ∔ H3` with `H1 = C ∩ NO`,
/// `C = H2 ∔ H1`, `NO = H1 ∔ H3`. Returns the realization restricted to the
/// `H2` coordinates, which is controllable and observable.
///
/// Complements are completed greedily, `H2` and `H3` from the canonical
/// (reduced echelon) bases of `C` and `NO`, and `H4` from the standard basis
/// vectors in index order, so the result is deterministic.
pub fn kalman_reduce<T: Field>(r: &FmRealization<T>) -> Result<(FmRealization<T>, KalmanReport<T>)> {
    let l = r.l();
    let c_space = controllability_space(r.a(), r.b()).canonical();
    let no_space = unobservable_space(r.c(), r.a()).canonical();
    let h1 = c_space.intersect(&no_space).canonical();
    let h2 = h1.complement_from(&c_space, c_space.basis());
    let h3 = h1.complement_from(&no_space, no_space.basis());
    let both = c_space.sum(&no_space);
    let full = Subspace::full(l);
    let h4 = both.complement_from(&full, &Matrix::identity(l));
    let p = Matrix::hstack(l, &[&h2, h1.basis(), &h4, &h3]);
    debug_assert_eq!(p.cols(), l);
    let reduced_l = h2.cols();
    let reduced = r.change_basis(&p)?.truncate_state(reduced_l)?;
    let report = KalmanReport {
        original_l: l,
        dim_c: c_space.dim(),
        dim_no: no_space.dim(),
        dim_intersection: h1.dim(),
        reduced_l,
        basis_change: p,
    };
    Ok((reduced, report))
}

/// Outcome of [`similarity_between`].
#[derive(Clone, Debug, PartialEq)]
pub enum Similarity<T> {
    /// `T` with `C² = C¹T⁻¹`, `A²_k = T A¹_k T⁻¹`, `B²_k = T B¹_k`, verified
    /// on every basis image.
    Similar(Matrix<T>),
    NotSimilar(String),
}

impl<T> Similarity<T> {
    pub fn matrix(&self) -> Option<&Matrix<T>> {
        match self {
            Similarity::Similar(t) => Some(t),
            Similarity::NotSimilar(_) => None,
        }
    }
}

/// Finds the similarity between two minimal realizations.
///
/// The candidate `T` maps each generator `A¹^ω(Z..)B¹_k(Z)u` to the matching
/// `A²^ω(Z..)B²_k(Z)u`. Generators are enumerated level by level in
/// canonical order (combined word, then basis tuple, then column `u`) and the
/// first `L` independent ones for the first realization are used. The
/// candidate is then checked against every defining relation; any failure
/// gives [`Similarity::NotSimilar`].
pub fn similarity_between<T: Field>(r1: &FmRealization<T>, r2: &FmRealization<T>) -> Result<Similarity<T>> {
    if !is_minimal(r1) {
        return Err(NcError::NotMinimal("first realization".into()));
    }
    if !is_minimal(r2) {
        return Err(NcError::NotMinimal("second realization".into()));
    }
    if r1.centre() != r2.centre() {
        return Ok(Similarity::NotSimilar("different centres".into()));
    }
    if r1.l() != r2.l() {
        return Ok(Similarity::NotSimilar(format!("state dimensions {} and {}", r1.l(), r2.l())));
    }
    if r1.value_shape() != r2.value_shape() || !r1.d().approx_eq(r2.d()) {
        return Ok(Similarity::NotSimilar("values at the centre differ".into()));
    }
    let l = r1.l();
    if l == 0 {
        return Ok(Similarity::Similar(Matrix::identity(0)));
    }
    let Some((g1, g2)) = paired_generators(r1.a(), r1.b(), r2.a(), r2.b(), l)? else {
        return Ok(Similarity::NotSimilar("generators do not span the state space".into()));
    };
    let t = &g2 * &linalg::inverse(&g1)?;
    if !linalg::is_invertible(&t) {
        return Ok(Similarity::NotSimilar("candidate transformation is singular".into()));
    }
    Ok(match verify_similarity(r1, r2, &t) {
        Ok(()) => Similarity::Similar(t),
        Err(why) => Similarity::NotSimilar(why),
    })
}

/// Checks `C²T = C¹`, `B²_k = T B¹_k` and `A²_k T = T A¹_k` on every basis
/// image.
pub fn verify_similarity<T: Field>(
    r1: &FmRealization<T>,
    r2: &FmRealization<T>,
    t: &Matrix<T>,
) -> std::result::Result<(), String> {
    if !(r2.c() * t).approx_eq(r1.c()) {
        return Err("C relation fails".into());
    }
    for k in 0..r1.num_vars() {
        for (b1, b2) in r1.b()[k].images().iter().zip(r2.b()[k].images()) {
            if !(t * b1).approx_eq(b2) {
                return Err(format!("B relation fails for variable {}", k + 1));
            }
        }
        for (a1, a2) in r1.a()[k].images().iter().zip(r2.a()[k].images()) {
            if !(a2 * t).approx_eq(&(t * a1)) {
                return Err(format!("A relation fails for variable {}", k + 1));
            }
        }
    }
    Ok(())
}
