//! Unital algebras over the scalar field, evaluation of expressions and
//! realizations over them, the stable-finiteness probe, the matrix-algebra
//! bridge and the Cohn-theorem harness.
//!
//! An `r×c` array of algebra elements is a [`Block`]. Invertibility of a
//! square block is decided through [`UnitalAlgebra::invert_block`], which
//! the concrete instances implement by flattening to one matrix over the
//! field.

use serde::{Deserialize, Serialize};
use std::fmt::Debug;

use crate::error::{NcError, Result};
use crate::expr::Expr;
use crate::field::Field;
use crate::functions::{equivalent, minimal_realization, SearchOptions};
use crate::kron::shuffle_matrix;
use crate::linalg;
use crate::linmap::BlockLinearMap;
use crate::matrix::Matrix;
use crate::realization::FmRealization;
use crate::sampling::{self, SeededRng};

/// A rectangular array of algebra elements, stored row by row.
pub type Block<E> = Vec<Vec<E>>;

/// The operations required of a unital algebra over `T`.
pub trait UnitalAlgebra<T: Field> {
    type Elem: Clone + Debug;

    /// Name in the `matn:<n>` / `ut:<n>` syntax.
    fn name(&self) -> String;
    /// Whether `a` is an element of this algebra.
    fn contains(&self, a: &Self::Elem) -> bool;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scalar_mul(&self, k: &T, a: &Self::Elem) -> Self::Elem;
    fn equals(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// An inverse of `a`, or `None` if `a` is not invertible.
    fn invert(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// A concrete matrix over `T` representing a square block, used for
    /// invertibility tests.
    fn flatten(&self, block: &Block<Self::Elem>) -> Matrix<T>;
    /// The inverse of a square block in `A^{r×r}`, or `None`.
    fn invert_block(&self, block: &Block<Self::Elem>) -> Option<Block<Self::Elem>>;
    /// A random element with integer data in `[-bound, bound]`.
    fn sample(&self, rng: &mut SeededRng, bound: i64) -> Self::Elem;
    /// Documented property of the instance (not computed).
    fn is_stably_finite(&self) -> bool;
}

fn flatten_matrix_block<T: Field>(block: &Block<Matrix<T>>, n: usize) -> Matrix<T> {
    let r = block.len();
    let c = block.first().map_or(0, |row| row.len());
    let mut m = Matrix::zeros(r * n, c * n);
    for (i, row) in block.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            m.set_block(i * n, j * n, a);
        }
    }
    m
}

fn unflatten_matrix_block<T: Field>(m: &Matrix<T>, n: usize) -> Block<Matrix<T>> {
    let (r, c) = (m.rows() / n, m.cols() / n);
    (0..r).map(|i| (0..c).map(|j| m.block(i * n, j * n, n, n)).collect()).collect()
}

/// The full matrix algebra `K^{n×n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixAlg {
    pub n: usize,
}

/// Upper-triangular `n×n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UpperTriangularAlg {
    pub n: usize,
}

macro_rules! matrix_based_algebra {
    ($ty:ty, $prefix:literal, $contains:expr, $sample_mask:expr) => {
        impl<T: Field> UnitalAlgebra<T> for $ty {
            type Elem = Matrix<T>;

            fn name(&self) -> String {
                format!("{}:{}", $prefix, self.n)
            }
            fn contains(&self, a: &Matrix<T>) -> bool {
                a.shape() == (self.n, self.n) && ($contains)(a)
            }
            fn zero(&self) -> Matrix<T> {
                Matrix::zeros(self.n, self.n)
            }
            fn one(&self) -> Matrix<T> {
                Matrix::identity(self.n)
            }
            fn add(&self, a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
                a + b
            }
            fn neg(&self, a: &Matrix<T>) -> Matrix<T> {
                a.scale(&(T::zero() - T::one()))
            }
            fn mul(&self, a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
                a * b
            }
            fn scalar_mul(&self, k: &T, a: &Matrix<T>) -> Matrix<T> {
                a.scale(k)
            }
            fn equals(&self, a: &Matrix<T>, b: &Matrix<T>) -> bool {
                a.approx_eq(b)
            }
            fn invert(&self, a: &Matrix<T>) -> Option<Matrix<T>> {
                linalg::inverse(a).ok()
            }
            fn flatten(&self, block: &Block<Matrix<T>>) -> Matrix<T> {
                flatten_matrix_block(block, self.n)
            }
            fn invert_block(&self, block: &Block<Matrix<T>>) -> Option<Block<Matrix<T>>> {
                let inv = linalg::inverse(&self.flatten(block)).ok()?;
                Some(unflatten_matrix_block(&inv, self.n))
            }
            fn sample(&self, rng: &mut SeededRng, bound: i64) -> Matrix<T> {
                let m: Matrix<T> = sampling::int_matrix(rng, self.n, self.n, bound);
                Matrix::from_fn(self.n, self.n, |i, j| if ($sample_mask)(i, j) { m.get(i, j).clone() } else { T::zero() })
            }
            fn is_stably_finite(&self) -> bool {
                true
            }
        }
    };
}

matrix_based_algebra!(MatrixAlg, "matn", |_: &Matrix<T>| true, |_: usize, _: usize| true);
matrix_based_algebra!(
    UpperTriangularAlg,
    "ut",
    |a: &Matrix<T>| (0..a.rows()).all(|i| (0..i).all(|j| a.get(i, j).is_zero())),
    |i: usize, j: usize| i <= j
);

/// A concrete algebra chosen by name: `matn:<n>` or `ut:<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedAlgebra {
    Matrix(MatrixAlg),
    UpperTriangular(UpperTriangularAlg),
}

impl NamedAlgebra {
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || NcError::Algebra(format!("unknown algebra '{name}', expected matn:<n> or ut:<n>"));
        let (kind, n) = name.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match kind {
            "matn" => Ok(NamedAlgebra::Matrix(MatrixAlg { n })),
            "ut" => Ok(NamedAlgebra::UpperTriangular(UpperTriangularAlg { n })),
            _ => Err(bad()),
        }
    }
}

/// `M ⊗ 1_A` as a block.
pub fn scalar_block<T: Field, A: UnitalAlgebra<T>>(alg: &A, m: &Matrix<T>) -> Block<A::Elem> {
    let one = alg.one();
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| alg.scalar_mul(m.get(i, j), &one)).collect()).collect()
}

pub fn block_add<T: Field, A: UnitalAlgebra<T>>(alg: &A, x: &Block<A::Elem>, y: &Block<A::Elem>) -> Block<A::Elem> {
    x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(a, b)| alg.add(a, b)).collect()).collect()
}

pub fn block_sub<T: Field, A: UnitalAlgebra<T>>(alg: &A, x: &Block<A::Elem>, y: &Block<A::Elem>) -> Block<A::Elem> {
    x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(a, b)| alg.add(a, &alg.neg(b))).collect()).collect()
}

/// Product of an `r×k` and a `k×c` block. `cols` is `c`, passed explicitly
/// because `y` has no rows when `k = 0`.
pub fn block_mul<T: Field, A: UnitalAlgebra<T>>(alg: &A, x: &Block<A::Elem>, y: &Block<A::Elem>, cols: usize) -> Block<A::Elem> {
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(y).fold(alg.zero(), |acc, (a, yrow)| alg.add(&acc, &alg.mul(a, &yrow[j]))))
                .collect()
        })
        .collect()
}

pub fn block_equals<T: Field, A: UnitalAlgebra<T>>(alg: &A, x: &Block<A::Elem>, y: &Block<A::Elem>) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(a, b)| alg.equals(a, b)))
}

/// `I_s ⊗ a`: the `s×s` block with `a` on the diagonal.
pub fn diagonal_block<T: Field, A: UnitalAlgebra<T>>(alg: &A, a: &A::Elem, s: usize) -> Block<A::Elem> {
    (0..s).map(|i| (0..s).map(|j| if i == j { a.clone() } else { alg.zero() }).collect()).collect()
}

/// `Σ_ij T(E_ij) ⊗ a_ij` as a `p×q` block.
pub fn apply_algebra<T: Field, A: UnitalAlgebra<T>>(alg: &A, map: &BlockLinearMap<T>, x: &Block<A::Elem>) -> Result<Block<A::Elem>> {
    let s = map.s();
    if x.len() != s || x.iter().any(|r| r.len() != s) {
        return Err(NcError::Dimension(format!("expected an {s}×{s} block of algebra elements")));
    }
    check_members(alg, x.iter().flatten())?;
    let mut out = vec![vec![alg.zero(); map.q()]; map.p()];
    for i in 0..s {
        for j in 0..s {
            let img = map.image(i, j);
            for (r, row) in out.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    let k = img.get(r, c);
                    if !k.is_zero() {
                        *entry = alg.add(entry, &alg.scalar_mul(k, &x[i][j]));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_members<'a, T: Field, A: UnitalAlgebra<T>>(alg: &A, elems: impl IntoIterator<Item = &'a A::Elem>) -> Result<()>
where
    A::Elem: 'a,
{
    if elems.into_iter().all(|a| alg.contains(a)) {
        Ok(())
    } else {
        Err(NcError::Algebra(format!("element does not belong to {}", alg.name())))
    }
}

/// Evaluates an expression at a tuple of algebra elements, following the
/// constant, variable, sum, product and inverse clauses.
pub fn eval_algebra<T: Field, A: UnitalAlgebra<T>>(e: &Expr, xs: &[A::Elem], alg: &A) -> Result<A::Elem> {
    check_members(alg, xs)?;
    eval_rec(e, xs, alg)
}

fn eval_rec<T: Field, A: UnitalAlgebra<T>>(e: &Expr, xs: &[A::Elem], alg: &A) -> Result<A::Elem> {
    Ok(match e {
        Expr::Const(k) => alg.scalar_mul(&T::from_q(k), &alg.one()),
        Expr::Var(j) => xs.get(*j).cloned().ok_or(NcError::VariableIndex { index: j + 1, d: xs.len() })?,
        Expr::Add(a, b) => alg.add(&eval_rec(a, xs, alg)?, &eval_rec(b, xs, alg)?),
        Expr::Mul(a, b) => alg.mul(&eval_rec(a, xs, alg)?, &eval_rec(b, xs, alg)?),
        Expr::Inv(a) => alg.invert(&eval_rec(a, xs, alg)?).ok_or(NcError::NotInDomain)?,
        Expr::ScaleLeft(k, a) | Expr::ScaleRight(a, k) => alg.scalar_mul(&T::from_q(k), &eval_rec(a, xs, alg)?),
    })
}

/// Whether `xs` lies in the algebra domain of `e`.
pub fn in_algebra_domain<T: Field, A: UnitalAlgebra<T>>(e: &Expr, xs: &[A::Elem], alg: &A) -> Result<bool> {
    match eval_algebra(e, xs, alg) {
        Ok(_) => Ok(true),
        Err(NcError::NotInDomain) => Ok(false),
        Err(err) => Err(err),
    }
}

/// The algebra evaluation of a realization at a tuple of `s×s` blocks:
/// `D⊗1 + (C⊗1)(I_L⊗1 − Σ(A_k^A(𝔛_k) − A_k(Y_k)⊗1))⁻¹ Σ(B_k^A(𝔛_k) − B_k(Y_k)⊗1)`.
/// The `L×L` block is inverted through the algebra; failure gives
/// [`NcError::NotInDomain`].
pub fn evaluate_algebra<T: Field, A: UnitalAlgebra<T>>(r: &FmRealization<T>, xs: &[Block<A::Elem>], alg: &A) -> Result<Block<A::Elem>> {
    if xs.len() != r.num_vars() {
        return Err(NcError::Dimension(format!("expected {} blocks, got {}", r.num_vars(), xs.len())));
    }
    let l = r.l();
    let q = r.value_shape().1;
    let mut pencil = scalar_block(alg, &Matrix::identity(l));
    let mut rhs = scalar_block(alg, &Matrix::zeros(l, q));
    for (k, x) in xs.iter().enumerate() {
        let ay = scalar_block(alg, &r.a()[k].apply(&r.centre()[k])?);
        let by = scalar_block(alg, &r.b()[k].apply(&r.centre()[k])?);
        pencil = block_sub(alg, &pencil, &block_sub(alg, &apply_algebra(alg, &r.a()[k], x)?, &ay));
        rhs = block_add(alg, &rhs, &block_sub(alg, &apply_algebra(alg, &r.b()[k], x)?, &by));
    }
    let inv = if l == 0 { Vec::new() } else { alg.invert_block(&pencil).ok_or(NcError::NotInDomain)? };
    let c = scalar_block(alg, r.c());
    let tail = block_mul(alg, &c, &block_mul(alg, &inv, &rhs, q), q);
    let d = scalar_block(alg, r.d());
    Ok(if l == 0 { d } else { block_add(alg, &d, &tail) })
}

/// Probes stable finiteness: builds `𝔄 = P·diag(a_i)·Q` and
/// `𝔅 = Q⁻¹·diag(b_i)·P⁻¹` from random invertible scalar matrices and
/// elements with `a_i b_i = 1`, so that `𝔄𝔅 = 1` by construction, and checks
/// `𝔅𝔄 = 1`. It also checks that whenever a random upper-triangular block
/// flattens to an invertible matrix, so does each diagonal entry. A probe
/// gives evidence, not a proof.
pub fn stably_finite_probe<T: Field, A: UnitalAlgebra<T>>(alg: &A, m: usize, trials: usize, rng: &mut SeededRng) -> bool {
    assert!(m >= 1, "probe size must be positive");
    for _ in 0..trials {
        let mut a_diag = Vec::with_capacity(m);
        let mut b_diag = Vec::with_capacity(m);
        while a_diag.len() < m {
            let a = alg.sample(rng, 3);
            if let Some(b) = alg.invert(&a) {
                a_diag.push(a);
                b_diag.push(b);
            }
        }
        let p: Matrix<T> = sampling::invertible_matrix(rng, m, 2);
        let q: Matrix<T> = sampling::invertible_matrix(rng, m, 2);
        let (p_inv, q_inv) = (linalg::inverse(&p).expect("invertible"), linalg::inverse(&q).expect("invertible"));
        let diag_block = |d: &[A::Elem]| -> Block<A::Elem> {
            (0..m).map(|i| (0..m).map(|j| if i == j { d[i].clone() } else { alg.zero() }).collect()).collect()
        };
        let big_a = block_mul(alg, &block_mul(alg, &scalar_block(alg, &p), &diag_block(&a_diag), m), &scalar_block(alg, &q), m);
        let big_b = block_mul(alg, &block_mul(alg, &scalar_block(alg, &q_inv), &diag_block(&b_diag), m), &scalar_block(alg, &p_inv), m);
        let one = scalar_block(alg, &Matrix::identity(m));
        if block_equals(alg, &block_mul(alg, &big_a, &big_b, m), &one) && !block_equals(alg, &block_mul(alg, &big_b, &big_a, m), &one) {
            return false;
        }
        let tri: Block<A::Elem> = (0..m).map(|i| (0..m).map(|j| if i <= j { alg.sample(rng, 3) } else { alg.zero() }).collect()).collect();
        if linalg::is_invertible(&alg.flatten(&tri)) && (0..m).any(|i| !linalg::is_invertible(&alg.flatten(&vec![vec![tri[i][i].clone()]]))) {
            return false;
        }
    }
    true
}

/// Outcome of [`matrix_algebra_bridge`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    /// Whether `X` is in the domain over `K^{n×n}`.
    pub algebra_side_in_domain: bool,
    /// Whether `P₁XP₁⁻¹` is in the level-`n` domain.
    pub matrix_side_in_domain: bool,
    /// Whether the two values agree after conjugation (vacuous if out of
    /// domain).
    pub values_agree: bool,
}

impl BridgeReport {
    pub fn consistent(&self) -> bool {
        self.algebra_side_in_domain == self.matrix_side_in_domain && self.values_agree
    }
}

/// Checks the correspondence between evaluation over `K^{n×n}` and level-`n`
/// evaluation. Each `xs[k]` is an `s×s` block of `n×n` matrices flattened as
/// `Σ E_ij ⊗ a_ij`. With `P₁ = E(n, s)`, `X ∈ DOM^{A_n}` iff
/// `P₁XP₁⁻¹ ∈ DOM_{sn}`, and then `R^{A_n}(X) = P₁⁻¹ R(P₁XP₁⁻¹) P₁`.
pub fn matrix_algebra_bridge<T: Field>(r: &FmRealization<T>, xs: &[Matrix<T>], n: usize) -> Result<BridgeReport> {
    let s = r.s();
    let alg = MatrixAlg { n };
    let blocks = xs
        .iter()
        .map(|x| {
            if x.shape() != (s * n, s * n) {
                return Err(NcError::Dimension("bridge point has the wrong shape".into()));
            }
            Ok(unflatten_matrix_block(x, n))
        })
        .collect::<Result<Vec<_>>>()?;
    let p1 = shuffle_matrix::<T>(n, s);
    let p1_inv = p1.transpose();
    let conj: Vec<Matrix<T>> = xs.iter().map(|x| &(&p1 * x) * &p1_inv).collect();
    let left = match evaluate_algebra(r, &blocks, &alg) {
        Ok(v) => Some(alg.flatten(&v)),
        Err(NcError::NotInDomain) => None,
        Err(e) => return Err(e),
    };
    let right = match r.evaluate(&conj) {
        Ok(v) => Some(v),
        Err(NcError::NotInDomain) => None,
        Err(e) => return Err(e),
    };
    let values_agree = match (&left, &right) {
        (Some(a), Some(b)) => a.approx_eq(&(&(&p1_inv * b) * &p1)),
        _ => true,
    };
    Ok(BridgeReport { algebra_side_in_domain: left.is_some(), matrix_side_in_domain: right.is_some(), values_agree })
}

/// Outcome of [`cohn_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohnReport {
    pub algebra: String,
    pub samples: usize,
    /// Samples lying in both algebra domains.
    pub common_domain: usize,
    /// Common-domain samples where the two direct evaluations agree.
    pub direct_agreements: usize,
    /// Common-domain samples where `R^A(I_s⊗a) = I_s⊗e₁^A(a)` holds for the
    /// minimal realization of `e₁` at the common centre.
    pub realization_agreements: usize,
    pub discrepancies: Vec<String>,
}

impl CohnReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares two expressions over an algebra after confirming that they are
/// equivalent as nc rational functions. Samples `a ∈ A^d`, keeps those in
/// both algebra domains, and compares the direct evaluations and the
/// realization route.
pub fn cohn_check<T: Field, A: UnitalAlgebra<T>>(e1: &Expr, e2: &Expr, alg: &A, samples: usize, opts: &SearchOptions) -> Result<CohnReport> {
    let d = e1.num_vars().max(e2.num_vars()).max(1);
    let verdict = equivalent::<T>(e1, e2, d, opts)?;
    if !verdict.is_equivalent() {
        return Err(NcError::Precondition("the expressions are not verified equivalent".into()));
    }
    let centre = verdict.common_centre.expect("equivalent verdicts carry a centre");
    let r = minimal_realization(e1, &centre)?;
    let s = r.s();
    let mut rng = sampling::rng(opts.seed ^ 0xc0_44c0_44);
    let mut report = CohnReport {
        algebra: alg.name(),
        samples,
        common_domain: 0,
        direct_agreements: 0,
        realization_agreements: 0,
        discrepancies: Vec::new(),
    };
    for idx in 0..samples {
        let xs: Vec<A::Elem> = (0..d).map(|_| alg.sample(&mut rng, opts.bound)).collect();
        let (v1, v2) = match (eval_algebra(e1, &xs, alg), eval_algebra(e2, &xs, alg)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(NcError::NotInDomain), _) | (_, Err(NcError::NotInDomain)) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        report.common_domain += 1;
        if alg.equals(&v1, &v2) {
            report.direct_agreements += 1;
        } else {
            report.discrepancies.push(format!("sample {idx}: direct evaluations differ"));
        }
        let blocks: Vec<Block<A::Elem>> = xs.iter().map(|a| diagonal_block(alg, a, s)).collect();
        match evaluate_algebra(&r, &blocks, alg) {
            Ok(v) if block_equals(alg, &v, &diagonal_block(alg, &v1, s)) => report.realization_agreements += 1,
            Ok(_) => report.discrepancies.push(format!("sample {idx}: realization value differs")),
            Err(NcError::NotInDomain) => report.discrepancies.push(format!("sample {idx}: outside the realization domain")),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
