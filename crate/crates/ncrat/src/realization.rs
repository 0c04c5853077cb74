//! Fornasini–Marchesini realizations centred at a matrix point, their
//! evaluation at every matrix level, and synthesis from expressions.

use crate::error::{NcError, Result};
use crate::expr::Expr;
use crate::field::{Field, Q};
use crate::linalg;
use crate::linmap::{apply_word, BlockLinearMap};
use crate::matrix::Matrix;
use crate::taylor::{tuple_units, words_up_to, TaylorTable};

/// The tuple `(L, D, C, A, B)` centred at `Y`:
///
/// `R(X) = I_m⊗D + (I_m⊗C)(I_{Lm} − Σ_k (X_k − I_m⊗Y_k)A_k)^{-1} Σ_k (X_k − I_m⊗Y_k)B_k`
///
/// for `X` a tuple of `sm×sm` matrices. `D` is usually `s×s`; matrix-valued
/// realizations have `D` of shape `αs×βs`, `C` of shape `αs×L` and maps
/// `B_k : K^{s×s} → K^{L×βs}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FmRealization<T> {
    s: usize,
    centre: Vec<Matrix<T>>,
    l: usize,
    d: Matrix<T>,
    c: Matrix<T>,
    a: Vec<BlockLinearMap<T>>,
    b: Vec<BlockLinearMap<T>>,
}

impl<T: Field> FmRealization<T> {
    /// Builds a realization after checking that all shapes agree.
    pub fn new(
        centre: Vec<Matrix<T>>,
        d: Matrix<T>,
        c: Matrix<T>,
        a: Vec<BlockLinearMap<T>>,
        b: Vec<BlockLinearMap<T>>,
    ) -> Result<Self> {
        let s = centre.first().map(|y| y.rows()).ok_or_else(|| NcError::Dimension("empty centre".into()))?;
        let l = c.cols();
        let bad = |m: &str| Err(NcError::Dimension(m.to_string()));
        if centre.iter().any(|y| y.shape() != (s, s)) {
            return bad("centre entries must all be s×s");
        }
        if a.len() != centre.len() || b.len() != centre.len() {
            return bad("need one A and one B map per variable");
        }
        if c.rows() != d.rows() {
            return bad("C and D must have the same number of rows");
        }
        if a.iter().any(|m| (m.s(), m.p(), m.q()) != (s, l, l)) {
            return bad("A maps must send s×s to L×L");
        }
        if b.iter().any(|m| (m.s(), m.p(), m.q()) != (s, l, d.cols())) {
            return bad("B maps must send s×s to L×cols(D)");
        }
        Ok(FmRealization { s, centre, l, d, c, a, b })
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn num_vars(&self) -> usize {
        self.centre.len()
    }
    pub fn centre(&self) -> &[Matrix<T>] {
        &self.centre
    }
    /// State dimension `L`.
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }
    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }
    pub fn a(&self) -> &[BlockLinearMap<T>] {
        &self.a
    }
    pub fn b(&self) -> &[BlockLinearMap<T>] {
        &self.b
    }
    /// Shape of the values, `rows(D) × cols(D)` at level one.
    pub fn value_shape(&self) -> (usize, usize) {
        self.d.shape()
    }

    fn level(&self, xs: &[Matrix<T>]) -> Result<usize> {
        if xs.len() != self.num_vars() {
            return Err(NcError::Dimension(format!("expected {} matrices, got {}", self.num_vars(), xs.len())));
        }
        let n = xs[0].rows();
        if xs.iter().any(|x| x.shape() != (n, n)) || n % self.s != 0 || n == 0 {
            return Err(NcError::Dimension(format!("point size {n} is not a multiple of s = {}", self.s)));
        }
        Ok(n / self.s)
    }

    /// The pencil `I_{Lm} − Σ (X_k − I_m⊗Y_k)A_k` and the right-hand side
    /// `Σ (X_k − I_m⊗Y_k)B_k`.
    fn pencil_parts(&self, xs: &[Matrix<T>]) -> Result<(Matrix<T>, Matrix<T>, usize)> {
        let m = self.level(xs)?;
        let im = Matrix::<T>::identity(m);
        let mut pencil = Matrix::identity(self.l * m);
        let mut rhs = Matrix::zeros(self.l * m, self.d.cols() * m);
        for k in 0..self.num_vars() {
            let delta = &xs[k] - &im.kron(&self.centre[k]);
            if delta.is_zero() {
                continue;
            }
            pencil = pencil - self.a[k].apply_blocks(&delta)?;
            rhs = rhs + self.b[k].apply_blocks(&delta)?;
        }
        Ok((pencil, rhs, m))
    }

    /// The pencil whose invertibility defines `DOM_{sm}`.
    pub fn pencil(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        Ok(self.pencil_parts(xs)?.0)
    }

    /// Membership in `DOM_{sm}`: the pencil is invertible.
    pub fn dom_contains(&self, xs: &[Matrix<T>]) -> Result<bool> {
        Ok(linalg::is_invertible(&self.pencil(xs)?))
    }

    /// Evaluates at a tuple of `sm×sm` matrices.
    pub fn evaluate(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let (pencil, rhs, m) = self.pencil_parts(xs)?;
        let sol = linalg::solve(&pencil, &rhs).map_err(|_| NcError::NotInDomain)?;
        let im = Matrix::<T>::identity(m);
        Ok(im.kron(&self.d) + im.kron(&self.c) * sol)
    }

    /// Evaluation over a matrix-based algebra. Each `xs[k]` is the flattened
    /// `s×s` array of algebra elements `Σ E_ij ⊗ a_ij` (size `sn`, element
    /// size `n`). The result is flattened the same way. Fails with
    /// [`NcError::NotInDomain`] when the `L×L` pencil over the algebra is not
    /// invertible.
    pub fn evaluate_tensor(&self, xs: &[Matrix<T>], n: usize) -> Result<Matrix<T>> {
        if xs.len() != self.num_vars() || xs.iter().any(|x| x.shape() != (self.s * n, self.s * n)) {
            return Err(NcError::Dimension("algebra point has the wrong shape".into()));
        }
        let one = Matrix::<T>::identity(n);
        let mut pencil = Matrix::identity(self.l * n);
        let mut rhs = Matrix::zeros(self.l * n, self.d.cols() * n);
        for k in 0..self.num_vars() {
            let entries = split_entries(&xs[k], self.s, n);
            let ay = self.a[k].apply(&self.centre[k])?.kron(&one);
            let by = self.b[k].apply(&self.centre[k])?.kron(&one);
            pencil = pencil - (self.a[k].apply_tensor(&entries)? - ay);
            rhs = rhs + (self.b[k].apply_tensor(&entries)? - by);
        }
        let sol = linalg::solve(&pencil, &rhs).map_err(|_| NcError::NotInDomain)?;
        Ok(self.d.kron(&one) + self.c.kron(&one) * sol)
    }

    /// Whether the algebra pencil is invertible at the flattened point.
    pub fn dom_contains_tensor(&self, xs: &[Matrix<T>], n: usize) -> Result<bool> {
        match self.evaluate_tensor(xs, n) {
            Ok(_) => Ok(true),
            Err(NcError::NotInDomain) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Taylor–Taylor coefficient `C A^ω(Z_1..Z_ℓ) B_k(Z_{ℓ+1})` for the word
    /// `ω g_k` given as `word`; the empty word gives `D`.
    pub fn tt_coefficient(&self, word: &[usize], zs: &[Matrix<T>]) -> Result<Matrix<T>> {
        if word.len() != zs.len() {
            return Err(NcError::Dimension("one argument per letter is required".into()));
        }
        let Some((&k, head)) = word.split_last() else { return Ok(self.d.clone()) };
        let aw = apply_word(&self.a, head, &zs[..head.len()])?;
        let bk = self.b.get(k).ok_or_else(|| NcError::Dimension(format!("letter {k} out of range")))?;
        Ok(&(&self.c * &aw) * &bk.apply(&zs[head.len()])?)
    }

    /// All realization coefficients up to `order`, on matrix-unit tuples.
    pub fn taylor_table(&self, order: usize) -> Result<TaylorTable<T>> {
        let s = self.s;
        let d = self.num_vars();
        let mut coeffs = Vec::new();
        for w in words_up_to(d, order) {
            let count = (s * s).pow(w.len() as u32);
            let mut row = Vec::with_capacity(count);
            for t in 0..count {
                let zs: Vec<Matrix<T>> =
                    tuple_units(s, w.len(), t).into_iter().map(|(i, j)| Matrix::unit(s, s, i, j)).collect();
                row.push(self.tt_coefficient(&w, &zs)?);
            }
            coeffs.push(row);
        }
        Ok(TaylorTable { s, d, order, centre: self.centre.clone(), coeffs })
    }

    /// Applies a change of state coordinates `x = P x'`: `C ↦ CP`,
    /// `A_k ↦ P^{-1} A_k P`, `B_k ↦ P^{-1} B_k`.
    pub fn change_basis(&self, p: &Matrix<T>) -> Result<Self> {
        let pinv = linalg::inverse(p)?;
        self.conjugate(&pinv, p)
    }

    /// Similarity by `T`: `C ↦ C T^{-1}`, `A_k ↦ T A_k T^{-1}`, `B_k ↦ T B_k`.
    pub fn similar(&self, t: &Matrix<T>) -> Result<Self> {
        let tinv = linalg::inverse(t)?;
        self.conjugate(t, &tinv)
    }

    fn conjugate(&self, t: &Matrix<T>, tinv: &Matrix<T>) -> Result<Self> {
        let a = self.a.iter().map(|m| m.map_images(|x| &(t * x) * tinv)).collect();
        let b = self.b.iter().map(|m| m.map_images(|x| t * x)).collect();
        FmRealization::new(self.centre.clone(), self.d.clone(), &self.c * tinv, a, b)
    }

    /// Keeps the first `k` state coordinates.
    pub fn truncate_state(&self, k: usize) -> Result<Self> {
        let (p, q) = self.value_shape();
        let a = self.a.iter().map(|m| m.map_images(|x| x.block(0, 0, k, k))).collect();
        let b = self.b.iter().map(|m| m.map_images(|x| x.block(0, 0, k, q))).collect();
        FmRealization::new(self.centre.clone(), self.d.clone(), self.c.block(0, 0, p, k), a, b)
    }

    fn same_centre(&self, other: &Self) -> Result<()> {
        if self.centre != other.centre {
            Err(NcError::CentreMismatch)
        } else {
            Ok(())
        }
    }

    /// `K ↦ K·I_s`: `L = 1`, `D = K I_s`, `C = 0`, all maps zero.
    pub fn synth_const(k: T, centre: &[Matrix<T>]) -> Result<Self> {
        let s = centre.first().map(|y| y.rows()).ok_or_else(|| NcError::Dimension("empty centre".into()))?;
        let a = vec![BlockLinearMap::zero(s, 1, 1); centre.len()];
        let b = vec![BlockLinearMap::zero(s, 1, s); centre.len()];
        FmRealization::new(centre.to_vec(), Matrix::scalar(s, k), Matrix::zeros(s, 1), a, b)
    }

    /// The variable `x_j` (0-based `j`): `L = s`, `D = Y_j`, `C = I_s`,
    /// `B_j = id`, everything else zero.
    pub fn synth_var(j: usize, centre: &[Matrix<T>]) -> Result<Self> {
        let d = centre.len();
        if j >= d {
            return Err(NcError::VariableIndex { index: j + 1, d });
        }
        let s = centre[0].rows();
        let a = vec![BlockLinearMap::zero(s, s, s); d];
        let b = (0..d).map(|k| if k == j { BlockLinearMap::identity(s) } else { BlockLinearMap::zero(s, s, s) }).collect();
        FmRealization::new(centre.to_vec(), centre[j].clone(), Matrix::identity(s), a, b)
    }

    /// `K·R`: `D ↦ KD`, `C ↦ KC`.
    pub fn scale_left(&self, k: &Matrix<T>) -> Result<Self> {
        if k.cols() != self.d.rows() {
            return Err(NcError::Dimension("scale_left shape mismatch".into()));
        }
        FmRealization::new(self.centre.clone(), k * &self.d, k * &self.c, self.a.clone(), self.b.clone())
    }

    /// `R·K`: `D ↦ DK`, `B_k ↦ B_k·K`.
    pub fn scale_right(&self, k: &Matrix<T>) -> Result<Self> {
        if k.rows() != self.d.cols() {
            return Err(NcError::Dimension("scale_right shape mismatch".into()));
        }
        let b = self.b.iter().map(|m| m.compose_right(k)).collect::<Result<Vec<_>>>()?;
        FmRealization::new(self.centre.clone(), &self.d * k, self.c.clone(), self.a.clone(), b)
    }

    /// Parallel connection: block-diagonal `A`, stacked `B`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_centre(other)?;
        let (l1, l2) = (self.l, other.l);
        let s = self.s;
        let q = self.d.cols();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..self.num_vars() {
            let z12 = BlockLinearMap::zero(s, l1, l2);
            let z21 = BlockLinearMap::zero(s, l2, l1);
            a.push(BlockLinearMap::grid(&[vec![&self.a[k], &z12], vec![&z21, &other.a[k]]])?);
            b.push(BlockLinearMap::grid(&[vec![&self.b[k]], vec![&other.b[k]]])?);
            debug_assert_eq!(b[k].q(), q);
        }
        let c = Matrix::hstack(self.c.rows(), &[&self.c, &other.c]);
        FmRealization::new(self.centre.clone(), &self.d + &other.d, c, a, b)
    }

    /// Series connection: `D = D¹D²`, `C = [C¹  D¹C²]`,
    /// `A_k = [[A¹_k, B¹_k·C²], [0, A²_k]]`, `B_k = [B¹_k·D²; B²_k]`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_centre(other)?;
        let (l1, l2) = (self.l, other.l);
        let s = self.s;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..self.num_vars() {
            let coupling = self.b[k].compose_right(&other.c)?;
            let z21 = BlockLinearMap::zero(s, l2, l1);
            a.push(BlockLinearMap::grid(&[vec![&self.a[k], &coupling], vec![&z21, &other.a[k]]])?);
            let top = self.b[k].compose_right(&other.d)?;
            b.push(BlockLinearMap::grid(&[vec![&top], vec![&other.b[k]]])?);
        }
        let c = Matrix::hstack(self.c.rows(), &[&self.c, &(&self.d * &other.c)]);
        FmRealization::new(self.centre.clone(), &self.d * &other.d, c, a, b)
    }

    /// Inversion: `D ↦ D^{-1}`, `C ↦ D^{-1}C`, `A_k ↦ A_k − B_k·(D^{-1}C)`,
    /// `B_k ↦ −B_k·D^{-1}`. Fails when `D` is singular.
    pub fn inv(&self) -> Result<Self> {
        let dinv = linalg::inverse(&self.d).map_err(|_| NcError::CentreNotInDomain)?;
        let c = &dinv * &self.c;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..self.num_vars() {
            a.push(self.a[k].sub(&self.b[k].compose_right(&c)?)?);
            b.push(self.b[k].compose_right(&(-&dinv))?);
        }
        FmRealization::new(self.centre.clone(), dinv, c, a, b)
    }
}

/// Splits a flattened `sn×sn` matrix into its `s²` blocks of size `n`
/// (row-major over the block grid).
pub(crate) fn split_entries<T: Field>(x: &Matrix<T>, s: usize, n: usize) -> Vec<Matrix<T>> {
    let mut out = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..s {
            out.push(x.block(i * n, j * n, n, n));
        }
    }
    out
}

/// Builds a realization of `e` centred at `Y` by structural recursion over
/// the five synthesis steps (constants, variables, sums, products, inverses),
/// plus scalings for the constants in front of subexpressions.
pub fn synthesize<T: Field>(e: &Expr, centre: &[Matrix<T>]) -> Result<FmRealization<T>> {
    if centre.is_empty() {
        return Err(NcError::Dimension("empty centre".into()));
    }
    if e.num_vars() > centre.len() {
        return Err(NcError::VariableIndex { index: e.num_vars(), d: centre.len() });
    }
    let s = centre[0].rows();
    match e {
        Expr::Const(k) => FmRealization::synth_const(T::from_q(k), centre),
        Expr::Var(j) => FmRealization::synth_var(*j, centre),
        Expr::Add(a, b) => synthesize(a, centre)?.add(&synthesize(b, centre)?),
        Expr::Mul(a, b) => synthesize(a, centre)?.mul(&synthesize(b, centre)?),
        Expr::Inv(a) => synthesize(a, centre)?.inv(),
        Expr::ScaleLeft(k, a) => synthesize(a, centre)?.scale_left(&Matrix::scalar(s, T::from_q(k))),
        Expr::ScaleRight(a, k) => synthesize(a, centre)?.scale_right(&Matrix::scalar(s, T::from_q(k))),
    }
}


impl FmRealization<Q> {
    /// Converts the centre and every coefficient to floats.
    pub fn to_f64(&self) -> FmRealization<f64> {
        FmRealization {
            s: self.s,
            centre: self.centre.iter().map(Matrix::to_f64).collect(),
            l: self.l,
            d: self.d.to_f64(),
            c: self.c.to_f64(),
            a: self.a.iter().map(BlockLinearMap::to_f64).collect(),
            b: self.b.iter().map(BlockLinearMap::to_f64).collect(),
        }
    }
}
