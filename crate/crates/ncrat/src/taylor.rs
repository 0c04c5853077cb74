//! Truncated Taylor–Taylor expansions of nc rational expressions around a
//! matrix centre, computed by structural recursion over truncated free power
//! series. This is independent of the realization machinery and serves as the
//! reference for realization coefficients.

use crate::error::{NcError, Result};
use crate::expr::Expr;
use crate::field::Field;
use crate::linalg;
use crate::matrix::Matrix;

/// A word in the letters `0..d`.
pub type Word = Vec<usize>;

/// All words of length at most `n`, ordered by length then lexicographically.
pub fn words_up_to(d: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &level {
            for a in 0..d {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Position of `w` in the order produced by [`words_up_to`].
pub fn word_index(d: usize, w: &[usize]) -> usize {
    let mut offset = 0;
    let mut p = 1;
    for _ in 0..w.len() {
        offset += p;
        p *= d;
    }
    offset + w.iter().fold(0, |acc, &a| acc * d + a)
}

/// Splits a flat basis-tuple index into the per-slot matrix-unit indices
/// `(i, j)`, most significant slot first.
pub fn tuple_units(s: usize, len: usize, mut idx: usize) -> Vec<(usize, usize)> {
    let s2 = s * s;
    let mut out = vec![(0, 0); len];
    for slot in (0..len).rev() {
        let b = idx % s2;
        idx /= s2;
        out[slot] = (b / s, b % s);
    }
    out
}

/// Multilinear coefficients `R_ω(E_{i1 j1}, …, E_{iℓ jℓ})` for all words of
/// length at most `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorTable<T> {
    pub s: usize,
    pub d: usize,
    pub order: usize,
    pub centre: Vec<Matrix<T>>,
    /// `coeffs[word_index(w)][tuple]`, with `s^{2|w|}` tuples per word.
    pub coeffs: Vec<Vec<Matrix<T>>>,
}

impl<T: Field> TaylorTable<T> {
    fn blank(s: usize, d: usize, order: usize, centre: Vec<Matrix<T>>) -> Self {
        let coeffs = words_up_to(d, order)
            .iter()
            .map(|w| vec![Matrix::zeros(s, s); (s * s).pow(w.len() as u32)])
            .collect();
        TaylorTable { s, d, order, centre, coeffs }
    }

    pub fn words(&self) -> Vec<Word> {
        words_up_to(self.d, self.order)
    }

    pub fn get(&self, w: &[usize]) -> &[Matrix<T>] {
        &self.coeffs[word_index(self.d, w)]
    }

    /// First `(word, tuple)` at which two tables differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<(Word, usize)> {
        let n = self.order.min(other.order);
        for w in words_up_to(self.d, n) {
            let (a, b) = (self.get(&w), other.get(&w));
            if let Some(t) = (0..a.len()).find(|&t| !a[t].approx_eq(&b[t])) {
                return Some((w, t));
            }
        }
        None
    }

    fn constant(s: usize, d: usize, order: usize, centre: &[Matrix<T>], k: Matrix<T>) -> Self {
        let mut t = Self::blank(s, d, order, centre.to_vec());
        t.coeffs[0][0] = k;
        t
    }

    fn variable(s: usize, d: usize, order: usize, centre: &[Matrix<T>], j: usize) -> Self {
        let mut t = Self::constant(s, d, order, centre, centre[j].clone());
        if order >= 1 {
            let wi = word_index(d, &[j]);
            for b in 0..s * s {
                t.coeffs[wi][b] = Matrix::unit(s, s, b / s, b % s);
            }
        }
        t
    }

    fn zip(&self, other: &Self, f: impl Fn(&Matrix<T>, &Matrix<T>) -> Matrix<T>) -> Self {
        let mut t = self.clone();
        for (a, b) in t.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = f(x, y);
            }
        }
        t
    }

    fn map(&self, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Self {
        let mut t = self.clone();
        for a in t.coeffs.iter_mut() {
            for x in a.iter_mut() {
                *x = f(x);
            }
        }
        t
    }

    /// `Σ_{ω = αβ, α ≠ ∅ (if skip_empty)} f_α ⋄ g_β` at one word and tuple,
    /// where `⋄` multiplies the values on the split argument lists.
    fn convolve_at(f: &Self, g: &Self, w: &[usize], tuple: usize, skip_empty: bool) -> Matrix<T> {
        let s2 = f.s * f.s;
        let l = w.len();
        let mut acc = Matrix::zeros(f.s, f.s);
        for p in usize::from(skip_empty)..=l {
            let tail = s2.pow((l - p) as u32);
            let (hi, lo) = (tuple / tail, tuple % tail);
            let a = &f.get(&w[..p])[hi];
            if a.is_zero() {
                continue;
            }
            let b = &g.get(&w[p..])[lo];
            if b.is_zero() {
                continue;
            }
            acc = acc + a * b;
        }
        acc
    }

    fn product(&self, other: &Self) -> Self {
        let mut t = Self::blank(self.s, self.d, self.order, self.centre.clone());
        for (wi, w) in self.words().iter().enumerate() {
            for tuple in 0..t.coeffs[wi].len() {
                t.coeffs[wi][tuple] = Self::convolve_at(self, other, w, tuple, false);
            }
        }
        t
    }

    /// Neumann recursion `g_∅ = D^{-1}`,
    /// `g_ω = -D^{-1} Σ_{ω=αβ, α≠∅} f_α ⋄ g_β`.
    fn inverse(&self) -> Result<Self> {
        let d_inv = linalg::inverse(&self.coeffs[0][0]).map_err(|_| NcError::CentreNotInDomain)?;
        let mut g = Self::blank(self.s, self.d, self.order, self.centre.clone());
        g.coeffs[0][0] = d_inv.clone();
        let neg = -&d_inv;
        for (wi, w) in self.words().iter().enumerate().skip(1) {
            for tuple in 0..g.coeffs[wi].len() {
                let acc = Self::convolve_at(self, &g, w, tuple, true);
                g.coeffs[wi][tuple] = &neg * &acc;
            }
        }
        Ok(g)
    }
}

/// Truncated expansion of `e` around the centre `Y` up to words of length
/// `order`. Fails with [`NcError::CentreNotInDomain`] if some inverse is
/// singular at the centre.
pub fn taylor_table<T: Field>(e: &Expr, centre: &[Matrix<T>], order: usize) -> Result<TaylorTable<T>> {
    let s = centre.first().map(|y| y.rows()).ok_or_else(|| NcError::Dimension("empty centre".into()))?;
    let d = centre.len();
    if e.num_vars() > d {
        return Err(NcError::VariableIndex { index: e.num_vars(), d });
    }
    rec(e, s, d, order, centre)
}

fn rec<T: Field>(e: &Expr, s: usize, d: usize, order: usize, y: &[Matrix<T>]) -> Result<TaylorTable<T>> {
    Ok(match e {
        Expr::Const(k) => TaylorTable::constant(s, d, order, y, Matrix::scalar(s, T::from_q(k))),
        Expr::Var(j) => TaylorTable::variable(s, d, order, y, *j),
        Expr::Add(a, b) => rec(a, s, d, order, y)?.zip(&rec(b, s, d, order, y)?, |x, z| x + z),
        Expr::Mul(a, b) => rec(a, s, d, order, y)?.product(&rec(b, s, d, order, y)?),
        Expr::Inv(a) => rec(a, s, d, order, y)?.inverse()?,
        Expr::ScaleLeft(k, a) | Expr::ScaleRight(a, k) => {
            let k = T::from_q(k);
            rec(a, s, d, order, y)?.map(|x| x.scale(&k))
        }
    })
}
