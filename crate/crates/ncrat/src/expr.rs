//! Noncommutative rational expressions: AST, formatting and direct
//! evaluation on matrix tuples.

use std::fmt;

use crate::error::{NcError, Result};
use crate::field::{format_q, qi, Field, Q};
use crate::linalg;
use crate::matrix::Matrix;

/// An nc rational expression. Variables are stored 0-based (`Var(0)` is
/// `x1`). Subtraction and unary minus are represented as
/// `Add(a, ScaleLeft(-1, b))` and `ScaleLeft(-1, a)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Q),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Inv(Box<Expr>),
    ScaleLeft(Q, Box<Expr>),
    ScaleRight(Box<Expr>, Q),
}

impl Expr {
    /// The variable `x_j` with a 1-based index, as written in text.
    pub fn x(j: usize) -> Expr {
        assert!(j >= 1, "variables are numbered from 1");
        Expr::Var(j - 1)
    }

    pub fn int(v: i64) -> Expr {
        Expr::Const(qi(v))
    }

    pub fn add(self, other: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: Expr) -> Expr {
        self.add(other.neg())
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(other))
    }

    pub fn inv(self) -> Expr {
        Expr::Inv(Box::new(self))
    }

    pub fn neg(self) -> Expr {
        Expr::ScaleLeft(qi(-1), Box::new(self))
    }

    /// Number of variables needed: one more than the largest index used.
    pub fn num_vars(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(j) => j + 1,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.num_vars().max(b.num_vars()),
            Expr::Inv(a) | Expr::ScaleLeft(_, a) | Expr::ScaleRight(a, _) => a.num_vars(),
        }
    }

    /// Evaluates on a tuple of `n×n` matrices. Returns
    /// [`NcError::NotInDomain`] as soon as some inverted subexpression is
    /// singular at the point.
    pub fn eval<T: Field>(&self, xs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let n = match xs.first() {
            Some(x) => x.rows(),
            None => return Err(NcError::Dimension("empty point".into())),
        };
        if xs.iter().any(|x| x.shape() != (n, n)) {
            return Err(NcError::Dimension("point entries must be square of equal size".into()));
        }
        if self.num_vars() > xs.len() {
            return Err(NcError::VariableIndex { index: self.num_vars(), d: xs.len() });
        }
        self.eval_rec(xs, n)
    }

    fn eval_rec<T: Field>(&self, xs: &[Matrix<T>], n: usize) -> Result<Matrix<T>> {
        Ok(match self {
            Expr::Const(k) => Matrix::scalar(n, T::from_q(k)),
            Expr::Var(j) => xs[*j].clone(),
            Expr::Add(a, b) => a.eval_rec(xs, n)? + b.eval_rec(xs, n)?,
            Expr::Mul(a, b) => a.eval_rec(xs, n)? * b.eval_rec(xs, n)?,
            Expr::Inv(a) => {
                let v = a.eval_rec(xs, n)?;
                linalg::inverse(&v).map_err(|_| NcError::NotInDomain)?
            }
            Expr::ScaleLeft(k, a) | Expr::ScaleRight(a, k) => a.eval_rec(xs, n)?.scale(&T::from_q(k)),
        })
    }

    /// Whether the point lies in the domain of regularity.
    pub fn in_domain<T: Field>(&self, xs: &[Matrix<T>]) -> bool {
        self.eval(xs).is_ok()
    }

    fn is_minus(k: &Q) -> bool {
        *k == qi(-1)
    }

    fn fmt_expr(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Add(a, b) => {
                a.fmt_expr(f)?;
                match b.as_ref() {
                    Expr::ScaleLeft(k, t) if Self::is_minus(k) => {
                        write!(f, " - ")?;
                        t.fmt_term(f)
                    }
                    _ => {
                        write!(f, " + ")?;
                        b.fmt_term(f)
                    }
                }
            }
            _ => self.fmt_term(f),
        }
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Mul(a, b) => {
                a.fmt_term(f)?;
                write!(f, "*")?;
                b.fmt_factor(f)
            }
            Expr::ScaleLeft(k, a) if !Self::is_minus(k) => {
                write!(f, "{}*", format_q(k))?;
                a.fmt_factor(f)
            }
            Expr::ScaleRight(a, k) => {
                a.fmt_term(f)?;
                write!(f, "*{}", format_q(k))
            }
            _ => self.fmt_factor(f),
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Inv(a) => {
                a.fmt_factor(f)?;
                write!(f, "^-1")
            }
            _ => self.fmt_atom(f),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(k) if *k >= qi(0) => write!(f, "{}", format_q(k)),
            Expr::Const(k) => write!(f, "(-{})", format_q(&-k.clone())),
            Expr::Var(j) => write!(f, "x{}", j + 1),
            Expr::ScaleLeft(k, a) if Self::is_minus(k) => {
                write!(f, "-")?;
                a.fmt_atom(f)
            }
            _ => {
                write!(f, "(")?;
                self.fmt_expr(f)?;
                write!(f, ")")
            }
        }
    }
}

/// Formats in the textual grammar accepted by [`crate::parse::parse`].
/// Trees produced by the parser round-trip exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_expr(f)
    }
}
