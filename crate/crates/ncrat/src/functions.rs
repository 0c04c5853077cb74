//! Function-level operations: minimal realizations of expressions, the
//! equivalence decision, McMillan degree, moving and inflating the centre,
//! evaluation at sizes that are not multiples of the centre size, and
//! realizations of matrices of expressions.

use serde::{Deserialize, Serialize};
use crate::error::{NcError, Result};
use crate::expr::Expr;
use crate::field::Field;
use crate::kron::{grid_to_inner, shuffle_matrix};
use crate::linalg;
use crate::linmap::BlockLinearMap;
use crate::matrix::Matrix;
use crate::realization::{synthesize, FmRealization};
use crate::reduction::{kalman_reduce, similarity_between, Similarity};
use crate::sampling;
use crate::taylor::{tuple_units, Word};

/// Synthesis followed by Kalman reduction.
pub fn minimal_realization<T: Field>(e: &Expr, centre: &[Matrix<T>]) -> Result<FmRealization<T>> {
    Ok(kalman_reduce(&synthesize(e, centre)?)?.0)
}

/// Parameters of the randomized parts of the equivalence decision.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub seed: u64,
    /// Sampling attempts per size.
    pub budget: usize,
    /// Sizes tried in order.
    pub sizes: Vec<usize>,
    /// Entries are drawn uniformly from `[-bound, bound]`.
    pub bound: i64,
    /// Attempts spent looking for a separating point after a negative verdict.
    pub separation_budget: usize,
}

impl SearchOptions {
    pub fn with_seed(seed: u64) -> Self {
        SearchOptions { seed, budget: 200, sizes: vec![1, 2, 3, 4], bound: 3, separation_budget: 500 }
    }
}

/// First sampled integer tuple in the domains of both expressions, trying
/// the sizes in order. `None` does not certify that the domains are disjoint.
pub fn find_common_centre<T: Field>(
    e1: &Expr,
    e2: &Expr,
    d: usize,
    opts: &SearchOptions,
) -> Option<Vec<Matrix<T>>> {
    let mut rng = sampling::rng(opts.seed);
    for &n in &opts.sizes {
        for _ in 0..opts.budget {
            let y: Vec<Matrix<T>> = sampling::int_point(&mut rng, d, n, opts.bound);
            if e1.in_domain(&y) && e2.in_domain(&y) {
                return Some(y);
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    /// No common centre was found within the sampling budget.
    Inconclusive,
}

/// A point where both expressions are defined and take different values.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatingPoint<T> {
    pub point: Vec<Matrix<T>>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

/// The first Taylor–Taylor coefficient (canonical order) where the two
/// minimal realizations differ.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorMismatch<T> {
    pub word: Word,
    pub tuple: usize,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict<T> {
    pub verdict: Verdict,
    pub common_centre: Option<Vec<Matrix<T>>>,
    /// Verified similarity between the two minimal realizations.
    pub similarity: Option<Matrix<T>>,
    pub separating_point: Option<SeparatingPoint<T>>,
    pub taylor_mismatch: Option<TaylorMismatch<T>>,
    /// Minimal state dimensions at the common centre.
    pub dimensions: Option<(usize, usize)>,
}

impl<T> EquivalenceVerdict<T> {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }
}

/// Decides whether two expressions in `d` variables define the same nc
/// rational function.
///
/// A common centre `Y` is sampled; both minimal realizations are built at `Y`
/// and compared by [`similarity_between`]. Equal functions have similar
/// minimal realizations, and similar realizations have identical
/// Taylor–Taylor coefficients, so a verified similarity proves equivalence.
/// A negative answer comes with the first differing Taylor–Taylor
/// coefficient and, when sampling finds one, a separating point.
pub fn equivalent<T: Field>(e1: &Expr, e2: &Expr, d: usize, opts: &SearchOptions) -> Result<EquivalenceVerdict<T>> {
    let mut verdict = EquivalenceVerdict {
        verdict: Verdict::Inconclusive,
        common_centre: None,
        similarity: None,
        separating_point: None,
        taylor_mismatch: None,
        dimensions: None,
    };
    let Some(centre) = find_common_centre::<T>(e1, e2, d, opts) else { return Ok(verdict) };
    let r1 = minimal_realization(e1, &centre)?;
    let r2 = minimal_realization(e2, &centre)?;
    verdict.common_centre = Some(centre.clone());
    verdict.dimensions = Some((r1.l(), r2.l()));
    if let Similarity::Similar(t) = similarity_between(&r1, &r2)? {
        verdict.verdict = Verdict::Equivalent;
        verdict.similarity = Some(t);
        return Ok(verdict);
    }
    verdict.verdict = Verdict::NotEquivalent;
    verdict.taylor_mismatch = first_coefficient_mismatch(&r1, &r2)?;
    verdict.separating_point = find_separating_point(e1, e2, d, centre[0].rows(), opts);
    Ok(verdict)
}

/// Searches for a point where both expressions are defined with different
/// values, at the given size first and then at the schedule sizes.
pub fn find_separating_point<T: Field>(
    e1: &Expr,
    e2: &Expr,
    d: usize,
    size: usize,
    opts: &SearchOptions,
) -> Option<SeparatingPoint<T>> {
    let mut rng = sampling::rng(opts.seed ^ 0x5eed_5eed);
    let mut sizes = vec![size];
    sizes.extend(opts.sizes.iter().copied().filter(|&n| n != size));
    let per_size = opts.separation_budget.div_ceil(sizes.len()).max(1);
    for n in sizes {
        for _ in 0..per_size {
            let x: Vec<Matrix<T>> = sampling::int_point(&mut rng, d, n, opts.bound);
            if let (Ok(a), Ok(b)) = (e1.eval(&x), e2.eval(&x)) {
                if !a.approx_eq(&b) {
                    return Some(SeparatingPoint { point: x, left: a, right: b });
                }
            }
        }
    }
    None
}

/// First Taylor–Taylor coefficient, in canonical (length, word, tuple)
/// order, at which two realizations with the same centre differ. Words up to
/// length `L1 + L2` are examined: if those all agree, the difference of the
/// two realizations has a realization of dimension `L1 + L2` whose
/// coefficients vanish up to that length, hence everywhere.
pub fn first_coefficient_mismatch<T: Field>(
    r1: &FmRealization<T>,
    r2: &FmRealization<T>,
) -> Result<Option<TaylorMismatch<T>>> {
    if r1.centre() != r2.centre() {
        return Err(NcError::CentreMismatch);
    }
    let s = r1.s();
    let d = r1.num_vars();
    let mut level: Vec<Word> = vec![Vec::new()];
    for len in 0..=(r1.l() + r2.l()) {
        for w in &level {
            for t in 0..(s * s).pow(len as u32) {
                let zs: Vec<Matrix<T>> =
                    tuple_units(s, len, t).into_iter().map(|(i, j)| Matrix::unit(s, s, i, j)).collect();
                let a = r1.tt_coefficient(w, &zs)?;
                let b = r2.tt_coefficient(w, &zs)?;
                if !a.approx_eq(&b) {
                    return Ok(Some(TaylorMismatch { word: w.clone(), tuple: t, left: a, right: b }));
                }
            }
        }
        level = level.iter().flat_map(|w| (0..d).map(move |k| [w.as_slice(), &[k]].concat())).collect();
    }
    Ok(None)
}

/// `𝔪(R) = L/s` for the minimal realization at `Y`; the state dimension of a
/// minimal realization is always a multiple of the centre size.
pub fn mcmillan_degree<T: Field>(e: &Expr, centre: &[Matrix<T>]) -> Result<usize> {
    let r = minimal_realization(e, centre)?;
    degree_of_minimal(&r)
}

/// `L/s` for a realization already known to be minimal.
pub fn degree_of_minimal<T: Field>(r: &FmRealization<T>) -> Result<usize> {
    if r.l() % r.s() != 0 {
        return Err(NcError::Divisibility { l: r.l(), s: r.s() });
    }
    Ok(r.l() / r.s())
}

/// Re-centres a realization at `Y'` of the same size. With
/// `T1 = I − Σ A_k(Y'_k − Y_k)` and `T2 = Σ B_k(Y_k − Y'_k)` the new tuple is
/// `D − C T1⁻¹T2`, `C T1⁻¹`, `A_k·T1⁻¹`, `B_k − A_k·(T1⁻¹T2)`.
pub fn shift_centre<T: Field>(r: &FmRealization<T>, new_centre: &[Matrix<T>]) -> Result<FmRealization<T>> {
    if new_centre.len() != r.num_vars() || new_centre.iter().any(|y| y.shape() != (r.s(), r.s())) {
        return Err(NcError::Dimension("new centre must have the same size and arity".into()));
    }
    let l = r.l();
    let mut t1 = Matrix::identity(l);
    let mut t2 = Matrix::zeros(l, r.value_shape().1);
    for k in 0..r.num_vars() {
        let delta = &new_centre[k] - &r.centre()[k];
        t1 = t1 - r.a()[k].apply(&delta)?;
        t2 = t2 - r.b()[k].apply(&delta)?;
    }
    let t1inv = linalg::inverse(&t1).map_err(|_| NcError::NotInDomain)?;
    let m = &t1inv * &t2;
    let d = r.d() - &(r.c() * &m);
    let c = r.c() * &t1inv;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in 0..r.num_vars() {
        a.push(r.a()[k].compose_right(&t1inv)?);
        b.push(r.b()[k].sub(&r.a()[k].compose_right(&m)?)?);
    }
    FmRealization::new(new_centre.to_vec(), d, c, a, b)
}

/// The same function realized at the centre `I_n ⊗ Y`: state dimension `Ln`,
/// `I_n⊗D`, `I_n⊗C`, and the maps applied blockwise at block size `sn`.
pub fn inflate_centre<T: Field>(r: &FmRealization<T>, n: usize) -> Result<FmRealization<T>> {
    let id = Matrix::<T>::identity(n);
    let centre = r.centre().iter().map(|y| id.kron(y)).collect();
    let a = r.a().iter().map(|m| m.inflate(n)).collect();
    let b = r.b().iter().map(|m| m.inflate(n)).collect();
    FmRealization::new(centre, id.kron(r.d()), id.kron(r.c()), a, b)
}

/// Evaluates the function realized by a minimal `r` at an `n×n` tuple.
/// When `s` divides `n` the realization is evaluated directly; otherwise it
/// is evaluated at `I_s ⊗ Z` and the value `F` is read off `I_s ⊗ F`.
pub fn eval_function_any_size<T: Field>(r: &FmRealization<T>, zs: &[Matrix<T>]) -> Result<Matrix<T>> {
    let n = zs.first().map(|z| z.rows()).ok_or_else(|| NcError::Dimension("empty point".into()))?;
    let s = r.s();
    if n % s == 0 {
        return r.evaluate(zs);
    }
    let id = Matrix::<T>::identity(s);
    let big: Vec<Matrix<T>> = zs.iter().map(|z| id.kron(z)).collect();
    let v = r.evaluate(&big)?;
    let (p, q) = (v.rows() / s, v.cols() / s);
    let f = v.block(0, 0, p, q);
    if !id.kron(&f).approx_eq(&v) {
        return Err(NcError::BlockStructure("value at I_s ⊗ Z is not of the form I_s ⊗ F".into()));
    }
    Ok(f)
}

/// Realization of the `α×β` matrix of functions given by entry realizations
/// (all `s×s` valued, common centre). The state space is the direct sum of
/// the entry state spaces in row-major order; `D = E(s,α)[D_ij]E(s,β)ᵀ`,
/// `C = E(s,α)·C_blk` and `B_k = B_blk,k·E(s,β)ᵀ`, so that values come out in
/// the layout `E(n,α)[r_ij(X)]E(n,β)ᵀ`. The result is not reduced.
pub fn assemble_matrix_valued<T: Field>(grid: &[Vec<FmRealization<T>>]) -> Result<FmRealization<T>> {
    let alpha = grid.len();
    let beta = grid.first().map(|r| r.len()).unwrap_or(0);
    if alpha == 0 || beta == 0 || grid.iter().any(|r| r.len() != beta) {
        return Err(NcError::Dimension("entry grid must be a nonempty rectangle".into()));
    }
    let first = &grid[0][0];
    let (s, d) = (first.s(), first.num_vars());
    for r in grid.iter().flatten() {
        if r.centre() != first.centre() {
            return Err(NcError::CentreMismatch);
        }
        if r.value_shape() != (s, s) {
            return Err(NcError::Dimension("entries must be s×s valued".into()));
        }
    }
    let ls: Vec<usize> = grid.iter().flatten().map(|r| r.l()).collect();
    let l: usize = ls.iter().sum();
    let offsets: Vec<usize> = ls.iter().scan(0, |acc, &x| {
        let o = *acc;
        *acc += x;
        Some(o)
    }).collect();

    let mut dgrid = Matrix::zeros(alpha * s, beta * s);
    let mut cblk = Matrix::zeros(alpha * s, l);
    for (i, row) in grid.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            dgrid.set_block(i * s, j * s, r.d());
            cblk.set_block(i * s, offsets[i * beta + j], r.c());
        }
    }
    let d_mat = grid_to_inner(&dgrid, alpha, beta, s, s);
    let c = &shuffle_matrix::<T>(s, alpha) * &cblk;
    let e_beta_t = shuffle_matrix::<T>(s, beta).transpose();
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for k in 0..d {
        let mut a_images = vec![Matrix::zeros(l, l); s * s];
        let mut b_images = vec![Matrix::zeros(l, beta * s); s * s];
        for (i, row) in grid.iter().enumerate() {
            for (j, r) in row.iter().enumerate() {
                let o = offsets[i * beta + j];
                for idx in 0..s * s {
                    a_images[idx].set_block(o, o, &r.a()[k].images()[idx]);
                    b_images[idx].set_block(o, j * s, &r.b()[k].images()[idx]);
                }
            }
        }
        a.push(BlockLinearMap::new(s, l, l, a_images)?);
        b.push(BlockLinearMap::new(s, l, beta * s, b_images)?.compose_right(&e_beta_t)?);
    }
    FmRealization::new(first.centre().to_vec(), d_mat, c, a, b)
}

/// Minimal realization of an `α×β` matrix of expressions: minimal entry
/// realizations, assembly, then Kalman reduction (the assembly itself need
/// not be minimal).
pub fn matrix_valued_realization<T: Field>(grid: &[Vec<Expr>], centre: &[Matrix<T>]) -> Result<FmRealization<T>> {
    let entries = grid
        .iter()
        .map(|row| row.iter().map(|e| minimal_realization(e, centre)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(kalman_reduce(&assemble_matrix_valued(&entries)?)?.0)
}

/// Entrywise values `r_ij(X)` (each `n×n`) arranged as
/// `E(n,α)[r_ij(X)]E(n,β)ᵀ`.
pub fn shuffled_grid_value<T: Field>(values: &[Vec<Matrix<T>>]) -> Matrix<T> {
    let alpha = values.len();
    let beta = values[0].len();
    let n = values[0][0].rows();
    let mut grid = Matrix::zeros(alpha * n, beta * n);
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            grid.set_block(i * n, j * n, v);
        }
    }
    grid_to_inner(&grid, alpha, beta, n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Q;
    use crate::parse::parse;

    fn yc() -> Vec<Matrix<Q>> {
        vec![Matrix::from_i64(&[&[0, 1], &[1, 0]]), Matrix::from_i64(&[&[1, 0], &[0, -1]])]
    }

    #[test]
    fn commutator_inverse_has_degree_three() {
        assert_eq!(mcmillan_degree(&parse("(x1*x2 - x2*x1)^-1", 2).unwrap(), &yc()).unwrap(), 3);
        assert_eq!(mcmillan_degree(&parse("x2", 2).unwrap(), &yc()).unwrap(), 1);
    }

    #[test]
    fn shifting_to_the_same_centre_is_a_no_op() {
        let r = minimal_realization(&parse("(x1*x2 - x2*x1)^-1", 2).unwrap(), &yc()).unwrap();
        assert_eq!(shift_centre(&r, &yc()).unwrap(), r);
    }

    #[test]
    fn hua_pair_is_equivalent() {
        let e1 = parse("(x1+x2)^-1", 2).unwrap();
        let e2 = parse("x1^-1*(1+x2*x1^-1)^-1", 2).unwrap();
        let v = equivalent::<Q>(&e1, &e2, 2, &SearchOptions::with_seed(7)).unwrap();
        assert!(v.is_equivalent());
    }
}
