//! Elimination-based linear algebra: echelon forms, rank, solves, kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::NcError;
use crate::field::{Field, Q};
use crate::matrix::Matrix;

/// Reduced row echelon form and the list of pivot columns.
///
/// Exact fields take the first nonzero entry as pivot; float fields take the
/// largest magnitude and treat entries below the relative tolerance as zero.
pub fn rref<T: Field>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let (rows, cols) = m.shape();
    let scale = m.max_magnitude();
    let mut a: Vec<Vec<T>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..rows {
            if a[i][c].negligible(scale) {
                continue;
            }
            match best {
                None => {
                    best = Some(i);
                    if T::EXACT {
                        break;
                    }
                }
                Some(b) if a[i][c].magnitude() > a[b][c].magnitude() => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else { continue };
        a.swap(r, p);
        let inv = T::one() / a[r][c].clone();
        for j in c..cols {
            a[r][j] = a[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                let v = a[i][j].clone() - f.clone() * a[r][j].clone();
                a[i][j] = v;
            }
            if !T::EXACT {
                a[i][c] = T::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (Matrix::from_rows(a), pivots)
}

/// Rank over the matrix's field.
pub fn rank<T: Field>(m: &Matrix<T>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    T::rank_of(m)
}

/// Rank of a rational matrix by fraction-free (Bareiss) elimination on the
/// integer matrix obtained by clearing each row's denominators.
pub fn bareiss_rank(m: &Matrix<Q>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Solves `A·X = B` for square `A`. Returns [`NcError::Singular`] when `A`
/// is not invertible.
pub fn solve<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, NcError> {
    if !a.is_square() {
        return Err(NcError::Dimension(format!("solve needs a square matrix, got {:?}", a.shape())));
    }
    if a.rows() != b.rows() {
        return Err(NcError::Dimension(format!(
            "solve: {:?} against right-hand side {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.rows();
    let k = b.cols();
    let scale = a.max_magnitude();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| a.row(i).iter().chain(b.row(i).iter()).cloned().collect())
        .collect();
    for c in 0..n {
        let mut best: Option<usize> = None;
        for i in c..n {
            if m[i][c].negligible(scale) {
                continue;
            }
            match best {
                None => {
                    best = Some(i);
                    if T::EXACT {
                        break;
                    }
                }
                Some(bi) if m[i][c].magnitude() > m[bi][c].magnitude() => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else { return Err(NcError::Singular) };
        m.swap(c, p);
        let inv = T::one() / m[c][c].clone();
        for j in c..n + k {
            m[c][j] = m[c][j].clone() * inv.clone();
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..n + k {
                let v = m[i][j].clone() - f.clone() * m[c][j].clone();
                m[i][j] = v;
            }
        }
    }
    Ok(Matrix::from_fn(n, k, |i, j| m[i][n + j].clone()))
}

pub fn inverse<T: Field>(a: &Matrix<T>) -> Result<Matrix<T>, NcError> {
    solve(a, &Matrix::identity(a.rows()))
}

pub fn is_invertible<T: Field>(a: &Matrix<T>) -> bool {
    a.is_square() && rank(a) == a.rows()
}

/// Determinant by elimination.
pub fn determinant<T: Field>(a: &Matrix<T>) -> T {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    let scale = a.max_magnitude();
    let mut m: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].negligible(scale)) else { return T::zero() };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det = det * m[c][c].clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / m[c][c].clone();
            for j in c..n {
                let v = m[i][j].clone() - f.clone() * m[c][j].clone();
                m[i][j] = v;
            }
        }
    }
    det
}

/// Some solution of the (possibly rectangular) system `A·X = B`, or `None`
/// if the system is inconsistent.
pub fn solve_any<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Option<Matrix<T>> {
    assert_eq!(a.rows(), b.rows(), "solve_any row mismatch");
    let n = a.cols();
    let aug = Matrix::hstack(a.rows(), &[a, b]);
    let (r, piv) = rref(&aug);
    if piv.iter().any(|&c| c >= n) {
        return None;
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (row, &c) in piv.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(c, j, r.get(row, n + j).clone());
        }
    }
    Some(x)
}

/// Basis of the null space `{v : A v = 0}` as the columns of a matrix.
pub fn kernel<T: Field>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.cols();
    let (r, piv) = rref(a);
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let mut k = Matrix::zeros(n, free.len());
    for (col, &f) in free.iter().enumerate() {
        k.set(f, col, T::one());
        for (row, &p) in piv.iter().enumerate() {
            k.set(p, col, -r.get(row, f).clone());
        }
    }
    k
}

/// Indices of the first maximal set of linearly independent columns, scanning
/// left to right.
pub fn independent_columns<T: Field>(a: &Matrix<T>) -> Vec<usize> {
    rref(a).1
}

/// A left inverse `K` with `K·A = I`, for `A` of full column rank.
pub fn left_inverse<T: Field>(a: &Matrix<T>) -> Result<Matrix<T>, NcError> {
    let kt = solve_any(&a.transpose(), &Matrix::identity(a.cols())).ok_or(NcError::Singular)?;
    let k = kt.transpose();
    if !(&k * a).approx_eq(&Matrix::identity(a.cols())) {
        return Err(NcError::Singular);
    }
    Ok(k)
}
