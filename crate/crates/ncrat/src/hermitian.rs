//! Hermitian structure of minimal realizations: the structure matrix `S`,
//! the symmetric form, hermitian descriptor realizations, the forms available
//! when `S` is invertible, and conversions between FM and descriptor
//! realizations.
//!
//! Over the rationals there are no square roots, so congruences are computed
//! as `S = T Δ T*` with `Δ` diagonal and every formula is written with the
//! diagonal weight `W = Δ` where the signature form uses `J`. For `f64` data
//! [`HermitianStructure::to_signature`] and
//! [`DescriptorRealization::to_signature`] fold `√|Δ|` into the other factors
//! and leave `W = J = sign(Δ)`.

use serde::{Deserialize, Serialize};
use crate::error::{NcError, Result};
use crate::field::Field;
use crate::linalg;
use crate::linmap::BlockLinearMap;
use crate::matrix::Matrix;
use crate::realization::FmRealization;
use crate::reduction::{is_minimal, paired_generators};
use crate::subspace::Subspace;

fn diag<T: Field>(w: &[T]) -> Matrix<T> {
    let mut m = Matrix::zeros(w.len(), w.len());
    for (i, x) in w.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}

/// Moore–Penrose inverse of a diagonal matrix given by its entries.
fn diag_pinv<T: Field>(w: &[T]) -> Vec<T> {
    w.iter().map(|x| if x.is_zero() { T::zero() } else { T::one() / x.clone() }).collect()
}

/// Congruence diagonalisation `S = T·diag(Δ)·T*` of a hermitian matrix with
/// `T` invertible, by symmetric elimination. When a diagonal pivot vanishes
/// a later nonzero diagonal entry is swapped in; failing that, row and
/// column `j` are added to row and column `k` to create one. This covers
/// every real symmetric matrix; complex inputs whose off-diagonal pivot
/// candidates are purely imaginary are rejected with
/// [`NcError::Precondition`].
pub fn congruence<T: Field>(s: &Matrix<T>) -> Result<(Matrix<T>, Vec<T>)> {
    let n = s.rows();
    if !s.is_square() || !s.approx_eq(&s.adjoint()) {
        return Err(NcError::Precondition("congruence needs a hermitian matrix".into()));
    }
    let scale = s.max_magnitude();
    let mut a = s.clone();
    let mut m = Matrix::<T>::identity(n);
    for k in 0..n {
        if a.get(k, k).negligible(scale) {
            if let Some(i) = (k + 1..n).find(|&i| !a.get(i, i).negligible(scale)) {
                swap_sym(&mut a, &mut m, k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).negligible(scale)) {
                add_sym(&mut a, &mut m, k, j);
                if a.get(k, k).negligible(scale) {
                    return Err(NcError::Precondition("no real pivot available in congruence".into()));
                }
            } else {
                continue;
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            let f = a.get(i, k).clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = a.get(i, c).clone() - f.clone() * a.get(k, c).clone();
                a.set(i, c, v);
                let v = m.get(i, c).clone() - f.clone() * m.get(k, c).clone();
                m.set(i, c, v);
            }
            let fc = f.conj();
            for r in 0..n {
                let v = a.get(r, i).clone() - fc.clone() * a.get(r, k).clone();
                a.set(r, i, v);
            }
        }
    }
    let delta: Vec<T> = (0..n)
        .map(|i| if a.get(i, i).negligible(scale) { T::zero() } else { a.get(i, i).clone() })
        .collect();
    let t = linalg::inverse(&m)?;
    Ok((t, delta))
}

fn swap_sym<T: Field>(a: &mut Matrix<T>, m: &mut Matrix<T>, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let (x, y) = (a.get(i, c).clone(), a.get(j, c).clone());
        a.set(i, c, y);
        a.set(j, c, x);
        let (x, y) = (m.get(i, c).clone(), m.get(j, c).clone());
        m.set(i, c, y);
        m.set(j, c, x);
    }
    for r in 0..n {
        let (x, y) = (a.get(r, i).clone(), a.get(r, j).clone());
        a.set(r, i, y);
        a.set(r, j, x);
    }
}

fn add_sym<T: Field>(a: &mut Matrix<T>, m: &mut Matrix<T>, k: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let v = a.get(k, c).clone() + a.get(j, c).clone();
        a.set(k, c, v);
        let v = m.get(k, c).clone() + m.get(j, c).clone();
        m.set(k, c, v);
    }
    for r in 0..n {
        let v = a.get(r, k).clone() + a.get(r, j).clone();
        a.set(r, k, v);
    }
}

/// `(p, q, t)`: counts of positive, negative and zero diagonal entries.
pub fn inertia<T: Field>(w: &[T]) -> (usize, usize, usize) {
    let p = w.iter().filter(|x| !x.is_zero() && x.real_sign() > 0).count();
    let q = w.iter().filter(|x| !x.is_zero() && x.real_sign() < 0).count();
    (p, q, w.len() - p - q)
}

fn check_hermitian_inputs<T: Field>(r: &FmRealization<T>) -> Result<()> {
    if r.value_shape() != (r.s(), r.s()) {
        return Err(NcError::Precondition("hermitian structure needs s×s valued realizations".into()));
    }
    if r.centre().iter().any(|y| !y.approx_eq(&y.adjoint())) {
        return Err(NcError::Precondition("the centre must be hermitian".into()));
    }
    if !is_minimal(r) {
        return Err(NcError::NotMinimal("hermitian structure needs a minimal realization".into()));
    }
    Ok(())
}

/// The hermitian structure matrix of a minimal realization at a hermitian
/// centre: the unique `S = S*` with `D* = D`, `A_k*·S = S·A_k`,
/// `B_k*·S = C·A_k` and `C·B_k = (C·B_k)*`.
///
/// `S` is determined on generators by `S A^ω(Z..)B_j(Z)u = (A*)^ω(Z..)A_j*(Z)C*u`.
/// It is solved from `L` independent generators and then every relation is
/// checked on every basis image. A failed check means the realized function
/// is not hermitian and gives [`NcError::NotHermitian`].
pub fn structure_matrix<T: Field>(r: &FmRealization<T>) -> Result<Matrix<T>> {
    check_hermitian_inputs(r)?;
    if !r.d().approx_eq(&r.d().adjoint()) {
        return Err(NcError::NotHermitian("D is not hermitian".into()));
    }
    let l = r.l();
    let a_adj: Vec<BlockLinearMap<T>> = r.a().iter().map(|m| m.adjoint()).collect();
    let c_adj = r.c().adjoint();
    let b_adj_side = a_adj.iter().map(|m| m.compose_right(&c_adj)).collect::<Result<Vec<_>>>()?;
    let Some((g1, g2)) = paired_generators(r.a(), r.b(), &a_adj, &b_adj_side, l)? else {
        return Err(NcError::NotMinimal("generators do not span the state space".into()));
    };
    let s = if l == 0 { Matrix::zeros(0, 0) } else { &g2 * &linalg::inverse(&g1)? };
    verify_structure(r, &s).map_err(NcError::NotHermitian)?;
    Ok(s)
}

/// Checks all structure relations for a candidate `S` on every basis image.
pub fn verify_structure<T: Field>(r: &FmRealization<T>, s: &Matrix<T>) -> std::result::Result<(), String> {
    if !s.approx_eq(&s.adjoint()) {
        return Err("S is not hermitian".into());
    }
    if !r.d().approx_eq(&r.d().adjoint()) {
        return Err("D is not hermitian".into());
    }
    for k in 0..r.num_vars() {
        let (a, b) = (&r.a()[k], &r.b()[k]);
        let (a_adj, b_adj) = (a.adjoint(), b.adjoint());
        let cb = b.compose_left(r.c()).map_err(|e| e.to_string())?;
        for idx in 0..a.images().len() {
            if !(&a_adj.images()[idx] * s).approx_eq(&(s * &a.images()[idx])) {
                return Err(format!("A relation fails for variable {}", k + 1));
            }
            if !(&b_adj.images()[idx] * s).approx_eq(&(r.c() * &a.images()[idx])) {
                return Err(format!("B relation fails for variable {}", k + 1));
            }
        }
        if !cb.is_hermitian() {
            return Err(format!("C·B is not hermitian for variable {}", k + 1));
        }
    }
    Ok(())
}

/// Outcome of the three subspace identities satisfied by a structure matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelImageReport {
    /// `ker S = ∩ ker A_k(X)`.
    pub kernel_of_s: bool,
    /// `Im S = ∨ Im A_k*(X)`.
    pub image_of_s: bool,
    /// `ker C* = ∩ ker B_k(X)`.
    pub kernel_of_c_adjoint: bool,
}

impl KernelImageReport {
    pub fn all(&self) -> bool {
        self.kernel_of_s && self.image_of_s && self.kernel_of_c_adjoint
    }
}

/// Checks the kernel and image identities exactly (over the basis images,
/// which suffices by linearity).
pub fn kernel_image_check<T: Field>(s: &Matrix<T>, r: &FmRealization<T>) -> KernelImageReport {
    let l = r.l();
    let a_imgs: Vec<&Matrix<T>> = r.a().iter().flat_map(|m| m.images()).collect();
    let a_adj: Vec<Matrix<T>> = r.a().iter().flat_map(|m| m.adjoint().images().to_vec()).collect();
    let b_imgs: Vec<&Matrix<T>> = r.b().iter().flat_map(|m| m.images()).collect();
    let common_ker = Subspace::span(&linalg::kernel(&Matrix::vstack(l, &a_imgs)));
    let ker_s = Subspace::span(&linalg::kernel(s));
    let adj_refs: Vec<&Matrix<T>> = a_adj.iter().collect();
    let span_adj = Subspace::span(&Matrix::hstack(l, &adj_refs));
    let im_s = Subspace::span(s);
    let s_dim = r.s();
    let ker_c_adj = Subspace::span(&linalg::kernel(&r.c().adjoint()));
    let ker_b = Subspace::span(&linalg::kernel(&Matrix::vstack(s_dim, &b_imgs)));
    KernelImageReport {
        kernel_of_s: ker_s.same_as(&common_ker),
        image_of_s: im_s.same_as(&span_adj),
        kernel_of_c_adjoint: ker_c_adj.same_as(&ker_b),
    }
}

/// The symmetric form `D + Č(I − Σ Ǎ_k(X_k−Y_k) W)⁻¹ Σ Ǎ_k(X_k−Y_k) Č*`
/// with hermitian maps `Ǎ_k`, where `S = T W T*`, `Č = C T^{-*}` and
/// `Ǎ_k = T* Â_k T` for `Â_k = K·[A_k*; B_k*]`, `K` a left inverse of `[S; C]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianStructure<T> {
    pub centre: Vec<Matrix<T>>,
    pub d: Matrix<T>,
    pub s_mat: Matrix<T>,
    pub t: Matrix<T>,
    /// Diagonal weight: `Δ` on the exact path, the semi-signature `J` after
    /// [`HermitianStructure::to_signature`].
    pub w: Vec<T>,
    pub c_check: Matrix<T>,
    pub a_hat: Vec<BlockLinearMap<T>>,
    pub a_check: Vec<BlockLinearMap<T>>,
}

/// Builds the symmetric form from a minimal realization and its structure
/// matrix.
pub fn symmetric_form<T: Field>(r: &FmRealization<T>, s_mat: &Matrix<T>) -> Result<HermitianStructure<T>> {
    let l = r.l();
    let s = r.s();
    let stacked = Matrix::vstack(l, &[s_mat, r.c()]);
    let k = if l == 0 { Matrix::zeros(0, s) } else { linalg::left_inverse(&stacked)? };
    let mut a_hat = Vec::new();
    for idx in 0..r.num_vars() {
        let a_adj = r.a()[idx].adjoint();
        let b_adj = r.b()[idx].adjoint();
        let images = a_adj
            .images()
            .iter()
            .zip(b_adj.images())
            .map(|(x, y)| &k * &Matrix::vstack(l, &[x, y]))
            .collect();
        a_hat.push(BlockLinearMap::new(s, l, l, images)?);
    }
    let (t, w) = congruence(s_mat)?;
    let t_adj = t.adjoint();
    let c_check = r.c() * &linalg::inverse(&t_adj)?;
    let a_check = a_hat.iter().map(|m| m.map_images(|x| &(&t_adj * x) * &t)).collect();
    Ok(HermitianStructure { centre: r.centre().to_vec(), d: r.d().clone(), s_mat: s_mat.clone(), t, w, c_check, a_hat, a_check })
}

impl<T: Field> HermitianStructure<T> {
    pub fn l(&self) -> usize {
        self.w.len()
    }

    /// `W` as a matrix.
    pub fn weight(&self) -> Matrix<T> {
        diag(&self.w)
    }

    /// Evaluates the symmetric form at a tuple of `sm×sm` matrices.
    pub fn evaluate(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let s = self.d.rows();
        let m = level(xs, s, self.centre.len())?;
        let im = Matrix::<T>::identity(m);
        let mm = pencil_sum(&self.a_check, &self.centre, xs, m)?;
        let w = im.kron(&self.weight());
        let pencil = Matrix::identity(self.l() * m) - &mm * &w;
        let c = im.kron(&self.c_check);
        let rhs = &mm * &c.adjoint();
        let sol = linalg::solve(&pencil, &rhs).map_err(|_| NcError::NotInDomain)?;
        Ok(im.kron(&self.d) + c * sol)
    }
}

impl HermitianStructure<f64> {
    /// Rescales so that the weight becomes `J = sign(Δ)`: with
    /// `G = diag(√|δ_i|)` (and `1` where `δ_i = 0`), `T ↦ TG`, `Č ↦ ČG⁻¹`,
    /// `Ǎ_k ↦ GǍ_kG`.
    pub fn to_signature(&self) -> Self {
        let g: Vec<f64> = self.w.iter().map(|x| if *x == 0.0 { 1.0 } else { x.abs().sqrt() }).collect();
        let gm = diag(&g);
        let ginv = diag(&g.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
        HermitianStructure {
            centre: self.centre.clone(),
            d: self.d.clone(),
            s_mat: self.s_mat.clone(),
            t: &self.t * &gm,
            w: self.w.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() }).collect(),
            c_check: &self.c_check * &ginv,
            a_hat: self.a_hat.clone(),
            a_check: self.a_check.iter().map(|m| m.map_images(|x| &(&gm * x) * &gm)).collect(),
        }
    }
}

fn level<T: Field>(xs: &[Matrix<T>], s: usize, d: usize) -> Result<usize> {
    if xs.len() != d {
        return Err(NcError::Dimension(format!("expected {d} matrices, got {}", xs.len())));
    }
    let n = xs[0].rows();
    if n == 0 || n % s != 0 || xs.iter().any(|x| x.shape() != (n, n)) {
        return Err(NcError::Dimension(format!("point size {n} is not a multiple of s = {s}")));
    }
    Ok(n / s)
}

/// `Σ (X_k − I_m⊗Y_k) A_k` applied blockwise.
fn pencil_sum<T: Field>(maps: &[BlockLinearMap<T>], centre: &[Matrix<T>], xs: &[Matrix<T>], m: usize) -> Result<Matrix<T>> {
    let p = maps.first().map(|x| x.p()).unwrap_or(0);
    let q = maps.first().map(|x| x.q()).unwrap_or(0);
    let im = Matrix::<T>::identity(m);
    let mut acc = Matrix::zeros(p * m, q * m);
    for k in 0..maps.len() {
        let delta = &xs[k] - &im.kron(&centre[k]);
        acc = acc + maps[k].apply_blocks(&delta)?;
    }
    Ok(acc)
}

/// Definiteness of a hermitian matrix via the signs of a congruence diagonal.
pub fn definiteness<T: Field>(f: &Matrix<T>) -> Result<Option<i32>> {
    let (_, w) = congruence(f)?;
    let (p, q, t) = inertia(&w);
    Ok(if t == 0 && q == 0 {
        Some(1)
    } else if t == 0 && p == 0 {
        Some(-1)
    } else {
        None
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum DescriptorKind<T> {
    /// `D_D + C_D (W_D − Σ A_{k,D}(X_k−Y_k))⁻¹ C_D*` with diagonal `W_D`.
    Hermitian { d: Matrix<T>, w: Vec<T> },
    /// `C_D (I − Σ A_{k,D}(X_k−Y_k))⁻¹ B_D`.
    General { b: Matrix<T> },
}

/// A descriptor realization centred at `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorRealization<T> {
    pub centre: Vec<Matrix<T>>,
    pub c: Matrix<T>,
    pub a: Vec<BlockLinearMap<T>>,
    pub kind: DescriptorKind<T>,
}

impl<T: Field> DescriptorRealization<T> {
    /// State dimension `L_D`.
    pub fn l(&self) -> usize {
        self.c.cols()
    }

    pub fn s(&self) -> usize {
        self.centre[0].rows()
    }

    /// The pencil `I_m⊗W_D − Σ(X_k − I_m⊗Y_k)A_{k,D}` (hermitian) or
    /// `I − Σ(X_k − I_m⊗Y_k)A_{k,D}` (general).
    pub fn pencil(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let m = level(xs, self.s(), self.centre.len())?;
        let im = Matrix::<T>::identity(m);
        let base = match &self.kind {
            DescriptorKind::Hermitian { w, .. } => im.kron(&diag(w)),
            DescriptorKind::General { .. } => Matrix::identity(self.l() * m),
        };
        Ok(base - pencil_sum(&self.a, &self.centre, xs, m)?)
    }

    pub fn dom_contains(&self, xs: &[Matrix<T>]) -> Result<bool> {
        Ok(linalg::is_invertible(&self.pencil(xs)?))
    }

    pub fn evaluate(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let pencil = self.pencil(xs)?;
        let m = xs[0].rows() / self.s();
        let im = Matrix::<T>::identity(m);
        let c = im.kron(&self.c);
        match &self.kind {
            DescriptorKind::Hermitian { d, .. } => {
                let sol = linalg::solve(&pencil, &c.adjoint()).map_err(|_| NcError::NotInDomain)?;
                Ok(im.kron(d) + c * sol)
            }
            DescriptorKind::General { b } => {
                let sol = linalg::solve(&pencil, &im.kron(b)).map_err(|_| NcError::NotInDomain)?;
                Ok(c * sol)
            }
        }
    }
}

impl DescriptorRealization<f64> {
    /// For hermitian descriptors, rescales so that `W_D` becomes the
    /// signature `J_D = sign(W_D)`: `C_D ↦ C_D G⁻¹`, `A_{k,D} ↦ G⁻¹A_{k,D}G⁻¹`
    /// with `G = diag(√|w_i|)`.
    pub fn to_signature(&self) -> Self {
        let DescriptorKind::Hermitian { d, w } = &self.kind else { return self.clone() };
        let ginv = diag(&w.iter().map(|x| 1.0 / x.abs().sqrt()).collect::<Vec<_>>());
        DescriptorRealization {
            centre: self.centre.clone(),
            c: &self.c * &ginv,
            a: self.a.iter().map(|m| m.map_images(|x| &(&ginv * x) * &ginv)).collect(),
            kind: DescriptorKind::Hermitian { d: d.clone(), w: w.iter().map(|x| x.signum()).collect() },
        }
    }
}

/// Hermitian descriptor realization with state dimension `L + s`.
///
/// `E = F + Č W⁺ Č*` and `S̃ = [[W, Č*], [Č, E]]`, which is invertible for
/// definite `F`. With `S̃⁻¹ = T̃ W_D T̃*`: `D_D = D − E`,
/// `C_D = [0 I_s] T̃^{-*}`, `A_{k,D} = T̃⁻¹ diag(Ǎ_k, 0) T̃^{-*}`. For a
/// semi-signature `W` the pseudo-inverse `W⁺` equals `W`.
pub fn descriptor_form<T: Field>(h: &HermitianStructure<T>, f: &Matrix<T>) -> Result<DescriptorRealization<T>> {
    let s = h.d.rows();
    let l = h.l();
    if f.shape() != (s, s) || definiteness(f)?.is_none() {
        return Err(NcError::NotDefinite);
    }
    let w = h.weight();
    let wp = diag(&diag_pinv(&h.w));
    let c_adj = h.c_check.adjoint();
    let e = f + &(&(&h.c_check * &wp) * &c_adj);
    let mut st = Matrix::zeros(l + s, l + s);
    st.set_block(0, 0, &w);
    st.set_block(0, l, &c_adj);
    st.set_block(l, 0, &h.c_check);
    st.set_block(l, l, &e);
    let st_inv = linalg::inverse(&st).map_err(|_| NcError::Precondition("extended structure matrix is singular".into()))?;
    let st_inv = (&st_inv + &st_inv.adjoint()).scale(&(T::one() / T::from_i64(2)));
    let (tt, wd) = congruence(&st_inv)?;
    let tt_inv = linalg::inverse(&tt)?;
    let tt_inv_adj = tt_inv.adjoint();
    let mut sel = Matrix::zeros(s, l + s);
    sel.set_block(0, l, &Matrix::identity(s));
    let c_d = &sel * &tt_inv_adj;
    let a_d = h
        .a_check
        .iter()
        .map(|m| {
            m.map_images(|x| {
                let mut big = Matrix::zeros(l + s, l + s);
                big.set_block(0, 0, x);
                &(&tt_inv * &big) * &tt_inv_adj
            })
        })
        .collect::<Vec<_>>();
    let a_d = a_d.into_iter().map(|m| BlockLinearMap::new(m.s(), l + s, l + s, m.images().to_vec())).collect::<Result<Vec<_>>>()?;
    Ok(DescriptorRealization { centre: h.centre.clone(), c: c_d, a: a_d, kind: DescriptorKind::Hermitian { d: &h.d - &e, w: wd } })
}

/// The two alternative forms available when `S` is invertible.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibleSForms<T> {
    /// `Q = S⁻¹C*`, with `B_k = A_k·Q`.
    pub q: Matrix<T>,
    /// `D − Č W⁻¹ Č*`.
    pub d_tilde: Matrix<T>,
    /// `W Ǎ_k W`.
    pub a_tilde: Vec<BlockLinearMap<T>>,
    structure: HermitianStructure<T>,
}

impl<T: Field> InvertibleSForms<T> {
    fn w_inv(&self) -> Matrix<T> {
        diag(&diag_pinv(&self.structure.w))
    }

    /// `D + Č W⁻¹ (W⁻¹ − Σ Ǎ_k(X_k−Y_k))⁻¹ Σ Ǎ_k(X_k−Y_k) Č*`.
    pub fn evaluate_front_factor_form(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let h = &self.structure;
        let m = level(xs, h.d.rows(), h.centre.len())?;
        let im = Matrix::<T>::identity(m);
        let mm = pencil_sum(&h.a_check, &h.centre, xs, m)?;
        let winv = im.kron(&self.w_inv());
        let c = im.kron(&h.c_check);
        let sol = linalg::solve(&(&winv - &mm), &(&mm * &c.adjoint())).map_err(|_| NcError::NotInDomain)?;
        Ok(im.kron(&h.d) + &(&c * &winv) * &sol)
    }

    /// `D̃ + Č (W − Σ Ã_k(X_k−Y_k))⁻¹ Č*`.
    pub fn evaluate_pencil_form(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let h = &self.structure;
        let m = level(xs, h.d.rows(), h.centre.len())?;
        let im = Matrix::<T>::identity(m);
        let mm = pencil_sum(&self.a_tilde, &h.centre, xs, m)?;
        let c = im.kron(&h.c_check);
        let pencil = im.kron(&h.weight()) - mm;
        let sol = linalg::solve(&pencil, &c.adjoint()).map_err(|_| NcError::NotInDomain)?;
        Ok(im.kron(&self.d_tilde) + c * sol)
    }
}

/// If `S` is invertible, returns `Q = S⁻¹C*` (checked against
/// `B_k = A_k·Q` on every basis image) and the two alternative forms. If `S`
/// is singular, returns `None` after confirming that `B_k = A_k·Q` has no
/// solution `Q`.
pub fn invertible_s_forms<T: Field>(h: &HermitianStructure<T>, r: &FmRealization<T>) -> Result<Option<InvertibleSForms<T>>> {
    let l = r.l();
    let s = r.s();
    if linalg::is_invertible(&h.s_mat) {
        let q = &linalg::inverse(&h.s_mat)? * &r.c().adjoint();
        for k in 0..r.num_vars() {
            for (a, b) in r.a()[k].images().iter().zip(r.b()[k].images()) {
                if !(a * &q).approx_eq(b) {
                    return Err(NcError::Precondition("B_k = A_k·Q fails for Q = S⁻¹C*".into()));
                }
            }
        }
        let winv = diag(&diag_pinv(&h.w));
        let w = h.weight();
        let d_tilde = &h.d - &(&(&h.c_check * &winv) * &h.c_check.adjoint());
        let a_tilde = h.a_check.iter().map(|m| m.map_images(|x| &(&w * x) * &w)).collect();
        return Ok(Some(InvertibleSForms { q, d_tilde, a_tilde, structure: h.clone() }));
    }
    let a_imgs: Vec<&Matrix<T>> = r.a().iter().flat_map(|m| m.images()).collect();
    let b_imgs: Vec<&Matrix<T>> = r.b().iter().flat_map(|m| m.images()).collect();
    let a_stack = Matrix::vstack(l, &a_imgs);
    let b_stack = Matrix::vstack(s, &b_imgs);
    if linalg::solve_any(&a_stack, &b_stack).is_some() {
        return Err(NcError::Precondition("S is singular but B_k = A_k·Q is solvable".into()));
    }
    Ok(None)
}

/// FM to general descriptor: `L_D = L + q`, `C_D = [C D]`,
/// `A_{k,D} = [[A_k, B_k], [0, 0]]`, `B_D = [0; I]` (with `q = cols(D)`).
pub fn fm_to_descriptor<T: Field>(r: &FmRealization<T>) -> Result<DescriptorRealization<T>> {
    let l = r.l();
    let (p, q) = r.value_shape();
    let c = Matrix::hstack(p, &[r.c(), r.d()]);
    let mut a = Vec::new();
    for k in 0..r.num_vars() {
        let images = r.a()[k]
            .images()
            .iter()
            .zip(r.b()[k].images())
            .map(|(x, y)| {
                let mut big = Matrix::zeros(l + q, l + q);
                big.set_block(0, 0, x);
                big.set_block(0, l, y);
                big
            })
            .collect();
        a.push(BlockLinearMap::new(r.s(), l + q, l + q, images)?);
    }
    let mut b = Matrix::zeros(l + q, q);
    b.set_block(l, 0, &Matrix::identity(q));
    Ok(DescriptorRealization { centre: r.centre().to_vec(), c, a, kind: DescriptorKind::General { b } })
}

/// Descriptor to FM. General: `D = C_D B_D`, `C = C_D`, `A_k = A_{k,D}`,
/// `B_k = A_{k,D}·B_D`. Hermitian (with invertible `W_D`):
/// `D = D_D + C_D W_D⁻¹ C_D*`, `C = C_D W_D⁻¹`, `A_k = A_{k,D}·W_D⁻¹`,
/// `B_k = A_{k,D}·(W_D⁻¹ C_D*)`.
pub fn descriptor_to_fm<T: Field>(rd: &DescriptorRealization<T>) -> Result<FmRealization<T>> {
    match &rd.kind {
        DescriptorKind::General { b } => {
            let bk = rd.a.iter().map(|m| m.compose_right(b)).collect::<Result<Vec<_>>>()?;
            FmRealization::new(rd.centre.clone(), &rd.c * b, rd.c.clone(), rd.a.clone(), bk)
        }
        DescriptorKind::Hermitian { d, w } => {
            if w.iter().any(|x| x.is_zero()) {
                return Err(NcError::Precondition("descriptor weight must be invertible".into()));
            }
            let winv = diag(&diag_pinv(w));
            let c = &rd.c * &winv;
            let right = &winv * &rd.c.adjoint();
            let a = rd.a.iter().map(|m| m.compose_right(&winv)).collect::<Result<Vec<_>>>()?;
            let bk = rd.a.iter().map(|m| m.compose_right(&right)).collect::<Result<Vec<_>>>()?;
            FmRealization::new(rd.centre.clone(), d + &(&rd.c * &right), c, a, bk)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, Q};
    use crate::functions::minimal_realization;
    use crate::parse::parse;
    use crate::sampling;

    fn yh() -> Vec<Matrix<Q>> {
        vec![Matrix::from_i64(&[&[1, 0], &[0, 2]]), Matrix::from_i64(&[&[0, 1], &[1, 0]])]
    }

    #[test]
    fn congruence_handles_zero_diagonal() {
        let s = Matrix::<Q>::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        let (t, w) = congruence(&s).unwrap();
        assert_eq!(&(&t * &diag(&w)) * &t.adjoint(), s);
        assert_eq!(inertia(&w), (1, 1, 1));
        assert_eq!(definiteness(&Matrix::<Q>::scalar(2, qi(-3))).unwrap(), Some(-1));
    }

    #[test]
    fn every_form_agrees_with_the_fm_realization() {
        let r = minimal_realization(&parse("(x1*x2 + x2*x1)^-1", 2).unwrap(), &yh()).unwrap();
        let s = structure_matrix(&r).unwrap();
        assert!(kernel_image_check(&s, &r).all());
        let h = symmetric_form(&r, &s).unwrap();
        let forms = invertible_s_forms(&h, &r).unwrap().expect("S is invertible");
        let desc = descriptor_form(&h, &Matrix::identity(2)).unwrap();
        let general = fm_to_descriptor(&r).unwrap();
        let mut g = sampling::rng(11);
        for _ in 0..3 {
            let x = sampling::symmetric_point::<Q>(&mut g, 2, 4, 3);
            let v = r.evaluate(&x).unwrap();
            assert_eq!(h.evaluate(&x).unwrap(), v);
            assert_eq!(forms.evaluate_front_factor_form(&x).unwrap(), v);
            assert_eq!(forms.evaluate_pencil_form(&x).unwrap(), v);
            assert_eq!(desc.evaluate(&x).unwrap(), v);
            assert_eq!(descriptor_to_fm(&desc).unwrap().evaluate(&x).unwrap(), v);
            assert_eq!(general.evaluate(&x).unwrap(), v);
            assert_eq!(descriptor_to_fm(&general).unwrap().evaluate(&x).unwrap(), v);
        }
    }

    #[test]
    fn indefinite_parameter_is_rejected() {
        let r = minimal_realization(&parse("(x1*x2 + x2*x1)^-1", 2).unwrap(), &yh()).unwrap();
        let h = symmetric_form(&r, &structure_matrix(&r).unwrap()).unwrap();
        let f = Matrix::<Q>::from_i64(&[&[1, 0], &[0, -1]]);
        assert!(matches!(descriptor_form(&h, &f), Err(NcError::NotDefinite)));
    }

    #[test]
    fn polynomial_has_singular_structure_matrix() {
        let r = minimal_realization(&parse("x1*x2*x1", 2).unwrap(), &yh()).unwrap();
        let h = symmetric_form(&r, &structure_matrix(&r).unwrap()).unwrap();
        assert_eq!(inertia(&h.w).2, 2);
        assert!(invertible_s_forms(&h, &r).unwrap().is_none());
    }
}
