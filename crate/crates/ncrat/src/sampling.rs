//! Seeded random integer matrices and points. All randomness in the crate
//! goes through an explicit `ChaCha8Rng` so results are reproducible.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::linalg;
use crate::matrix::Matrix;

pub use rand::SeedableRng;
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An `rows×cols` matrix with entries uniform in `[-bound, bound]`.
pub fn int_matrix<T: Field>(rng: &mut SeededRng, rows: usize, cols: usize, bound: i64) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::from_i64(rng.gen_range(-bound..=bound)))
}

/// A `d`-tuple of `n×n` integer matrices.
pub fn int_point<T: Field>(rng: &mut SeededRng, d: usize, n: usize, bound: i64) -> Vec<Matrix<T>> {
    (0..d).map(|_| int_matrix(rng, n, n, bound)).collect()
}

/// A `d`-tuple of `n×n` integer symmetric matrices.
pub fn symmetric_point<T: Field>(rng: &mut SeededRng, d: usize, n: usize, bound: i64) -> Vec<Matrix<T>> {
    (0..d)
        .map(|_| {
            let m: Matrix<T> = int_matrix(rng, n, n, bound);
            Matrix::from_fn(n, n, |i, j| if i <= j { m.get(i, j).clone() } else { m.get(j, i).clone() })
        })
        .collect()
}

/// An invertible `n×n` integer matrix, found by rejection sampling.
pub fn invertible_matrix<T: Field>(rng: &mut SeededRng, n: usize, bound: i64) -> Matrix<T> {
    loop {
        let m = int_matrix(rng, n, n, bound);
        if linalg::is_invertible(&m) {
            return m;
        }
    }
}
