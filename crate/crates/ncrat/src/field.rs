//! Scalar fields.
//!
//! Everything structural (rank, kernels, Kalman reduction, similarity) runs over
//! exact rationals. `f64` and `Complex64` are provided for the float congruence
//! path of the hermitian module and for quick numerical evaluation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::matrix::Matrix;

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Q = BigRational;

/// Relative pivot/residual threshold for floating point scalars.
///
/// A float entry is treated as zero when its magnitude is at most
/// `FLOAT_TOL * max|entry|` of the matrix it belongs to.
pub const FLOAT_TOL: f64 = 1e-9;

/// A field of scalars. Arithmetic never leaves the implementing type, so exact
/// and floating point values cannot be mixed by accident.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for exact arithmetic; rank decisions then never use a tolerance.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Embeds an exact rational.
    fn from_q(q: &Q) -> Self;
    fn is_zero(&self) -> bool;
    /// Complex conjugate; the identity on real fields.
    fn conj(&self) -> Self;
    /// Absolute value as a float, used for pivoting and tolerances.
    fn magnitude(&self) -> f64;
    /// Sign of the real part: -1, 0 or 1.
    fn real_sign(&self) -> i32;

    /// Zero test relative to `scale` (the largest magnitude in play).
    fn negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= FLOAT_TOL * scale
        }
    }

    /// Rank of a matrix over this field.
    fn rank_of(m: &Matrix<Self>) -> usize {
        crate::linalg::rref(m).1.len()
    }
}

impl Field for Q {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Q as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <Q as num_traits::One>::one()
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn real_sign(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn rank_of(m: &Matrix<Self>) -> usize {
        crate::linalg::bareiss_rank(m)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_q(q: &Q) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn conj(&self) -> Self {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn real_sign(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_q(q: &Q) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn real_sign(&self) -> i32 {
        self.re.real_sign()
    }
}

/// Shorthand for the rational `p/q`.
pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

/// Shorthand for the integer `p` as a rational.
pub fn qi(p: i64) -> Q {
    Q::from_integer(BigInt::from(p))
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_q(text: &str) -> Option<Q> {
    let t = text.trim();
    match t.split_once('/') {
        None => t.parse::<BigInt>().ok().map(Q::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if num_traits::Zero::is_zero(&d) {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
    }
}

/// Formats an exact rational as `"p"` or `"p/q"`.
pub fn format_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
