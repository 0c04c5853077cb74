//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use ncrat::field::{q, Q};
use ncrat::{parse, BlockLinearMap, Expr, FmRealization, Matrix};

pub fn m(rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_i64(rows)
}

/// Integer matrix times `1/den`.
pub fn mq(den: i64, rows: &[&[i64]]) -> Matrix<Q> {
    Matrix::from_i64(rows).scale(&q(1, den))
}

/// The map `X ↦ (I_k ⊗ X)·M` for `2×2` inputs.
pub fn kr(mat: &Matrix<Q>) -> BlockLinearMap<Q> {
    BlockLinearMap::from_kron_right(2, mat).unwrap()
}

/// The worked centre `Yc`.
pub fn yc() -> Vec<Matrix<Q>> {
    vec![m(&[&[0, 1], &[1, 0]]), m(&[&[1, 0], &[0, -1]])]
}

/// The hermitian centre `Yh`.
pub fn yh() -> Vec<Matrix<Q>> {
    vec![m(&[&[1, 0], &[0, 2]]), m(&[&[0, 1], &[1, 0]])]
}

pub fn e(text: &str) -> Expr {
    parse(text, 2).unwrap()
}

pub fn rcomm() -> Expr {
    e("(x1*x2 - x2*x1)^-1")
}

pub fn hfix() -> Expr {
    e("(x1*x2 + x2*x1)^-1")
}

pub fn hua_left() -> Expr {
    e("(x1+x2)^-1")
}

pub fn hua_right() -> Expr {
    e("x1^-1*(1+x2*x1^-1)^-1")
}

/// The synthesized `L = 8` realization of the commutator inverse at `Yc`,
/// transcribed from the published listing.
pub fn golden_l8() -> FmRealization<Q> {
    let d = mq(2, &[&[0, 1], &[-1, 0]]);
    let c = mq(2, &[&[0, 1, 1, 0, 0, -1, 0, 1], &[-1, 0, 0, -1, 1, 0, 1, 0]]);
    let a1 = mq(
        2,
        &[
            &[0, -1, 1, 0, 0, 1, 0, -1],
            &[-1, 0, 0, 1, 1, 0, 1, 0],
            &[0; 8],
            &[0; 8],
            &[0; 8],
            &[0; 8],
            &[0, -1, -1, 0, 0, 1, 0, -1],
            &[1, 0, 0, 1, -1, 0, -1, 0],
        ],
    );
    let a2 = mq(
        2,
        &[
            &[0; 8],
            &[0; 8],
            &[0, -1, -1, 0, 0, 1, 0, -1],
            &[1, 0, 0, 1, -1, 0, -1, 0],
            &[1, 0, 0, 1, -1, 0, 1, 0],
            &[0, -1, -1, 0, 0, 1, 0, 1],
            &[0; 8],
            &[0; 8],
        ],
    );
    let b1 = mq(2, &[&[0, -1], &[-1, 0], &[0, 0], &[0, 0], &[0, 0], &[0, 0], &[0, -1], &[1, 0]]);
    let b2 = mq(2, &[&[0, 0], &[0, 0], &[0, -1], &[1, 0], &[1, 0], &[0, -1], &[0, 0], &[0, 0]]);
    FmRealization::new(yc(), d, c, vec![kr(&a1), kr(&a2)], vec![kr(&b1), kr(&b2)]).unwrap()
}

/// The published minimal `L = 6` realization of the commutator inverse at `Yc`.
pub fn golden_l6() -> FmRealization<Q> {
    let d = mq(2, &[&[0, 1], &[-1, 0]]);
    let c = mq(2, &[&[1, 0, 0, 1, 0, 2], &[0, -1, 1, 0, -2, 0]]);
    let a1 = mq(
        4,
        &[
            &[0; 6],
            &[0; 6],
            &[-2, 0, 0, -2, 0, -4],
            &[0, 2, -2, 0, 4, 0],
            &[1, 0, 0, -1, 0, -2],
            &[0, 1, 1, 0, -2, 0],
        ],
    );
    let a2 = mq(
        4,
        &[
            &[-2, 0, 0, -2, 0, -4],
            &[0, 2, -2, 0, 4, 0],
            &[0; 6],
            &[0; 6],
            &[0, -1, -1, 0, -2, 0],
            &[1, 0, 0, -1, 0, 2],
        ],
    );
    let b1 = mq(4, &[&[0, 0], &[0, 0], &[0, -2], &[2, 0], &[0, -1], &[-1, 0]]);
    let b2 = mq(4, &[&[0, -2], &[2, 0], &[0, 0], &[0, 0], &[-1, 0], &[0, 1]]);
    FmRealization::new(yc(), d, c, vec![kr(&a1), kr(&a2)], vec![kr(&b1), kr(&b2)]).unwrap()
}

/// Cofactor-expansion determinant, independent of the elimination code.
pub fn det_cofactor(a: &Matrix<Q>) -> Q {
    let n = a.rows();
    if n == 0 {
        return q(1, 1);
    }
    if n == 1 {
        return a.get(0, 0).clone();
    }
    let mut acc = q(0, 1);
    for j in 0..n {
        let entry = a.get(0, j);
        if *entry == q(0, 1) {
            continue;
        }
        let minor = Matrix::from_fn(n - 1, n - 1, |r, c| a.get(r + 1, if c < j { c } else { c + 1 }).clone());
        let term = entry.clone() * det_cofactor(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Proptest strategy: `rows×cols` integer matrices with entries in `[-bound, bound]`.
pub fn arb_matrix(rows: usize, cols: usize, bound: i64) -> impl proptest::strategy::Strategy<Value = Matrix<Q>> {
    use proptest::prelude::*;
    proptest::collection::vec(-bound..=bound, rows * cols)
        .prop_map(move |v| Matrix::from_fn(rows, cols, |i, j| q(v[i * cols + j], 1)))
}

/// Proptest strategy: a seed for the crate's own sampler.
pub fn arb_seed() -> impl proptest::strategy::Strategy<Value = u64> {
    proptest::prelude::any::<u64>()
}
