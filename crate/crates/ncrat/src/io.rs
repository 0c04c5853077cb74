//! JSON encoding of matrices, maps, realizations and results.
//!
//! Exact rationals are written as strings `"p/q"` (or `"p"` for integers);
//! floats are JSON numbers and complex numbers are `[re, im]` pairs.
//! Matrices are `{"rows": n, "cols": m, "data": [[..], ..]}`. Words in
//! Taylor tables and mismatch certificates use 1-based letters, so `[1, 2]`
//! stands for `g_1 g_2`.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::algebra::{BridgeReport, CohnReport};
use crate::error::{NcError, Result};
use crate::field::{parse_q, Field, Q};
use crate::functions::{EquivalenceVerdict, SeparatingPoint, TaylorMismatch, Verdict};
use crate::hermitian::{DescriptorKind, DescriptorRealization, HermitianStructure, KernelImageReport};
use crate::linmap::BlockLinearMap;
use crate::matrix::Matrix;
use crate::realization::FmRealization;
use crate::reduction::KalmanReport;
use crate::taylor::{words_up_to, TaylorTable};

fn bad(msg: impl Into<String>) -> NcError {
    NcError::Serde(msg.into())
}

/// Scalars with a JSON encoding.
pub trait JsonScalar: Field {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for Q {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_q(s).ok_or_else(|| bad(format!("not a rational: {s:?}"))),
            Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().expect("checked").into())),
            other => Err(bad(format!("expected a \"p/q\" string, got {other}"))),
        }
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| bad("number out of range")),
            Value::String(s) => parse_q(s).map(|q| f64::from_q(&q)).ok_or_else(|| bad(format!("not a number: {s:?}"))),
            other => Err(bad(format!("expected a number, got {other}"))),
        }
    }
}

impl JsonScalar for Complex64 {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok(Complex64::new(f64::from_json(re)?, f64::from_json(im)?)),
            _ => f64::from_json(v).map(|re| Complex64::new(re, 0.0)),
        }
    }
}

/// Types with a JSON encoding.
pub trait ToJson {
    fn to_json(&self) -> Value;

    fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values always serialize")
    }
}

/// Types that can be read back from their JSON encoding.
pub trait FromJson: Sized {
    fn from_json(v: &Value) -> Result<Self>;

    fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("field \"{key}\" must be a non-negative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn vec_to_json<X: ToJson>(xs: &[X]) -> Value {
    Value::Array(xs.iter().map(ToJson::to_json).collect())
}

fn vec_from_json<X: FromJson>(v: &Value, what: &str) -> Result<Vec<X>> {
    array(v, what)?.iter().map(X::from_json).collect()
}

fn scalars_to_json<T: JsonScalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(JsonScalar::to_json).collect())
}

fn scalars_from_json<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    array(v, what)?.iter().map(T::from_json).collect()
}

impl<T: JsonScalar> ToJson for Matrix<T> {
    fn to_json(&self) -> Value {
        let data: Vec<Value> = (0..self.rows()).map(|i| Value::Array((0..self.cols()).map(|j| self.get(i, j).to_json()).collect())).collect();
        json!({"rows": self.rows(), "cols": self.cols(), "data": data})
    }
}

impl<T: JsonScalar> FromJson for Matrix<T> {
    fn from_json(v: &Value) -> Result<Self> {
        let (rows, cols) = (usize_field(v, "rows")?, usize_field(v, "cols")?);
        let data = array(field(v, "data")?, "data")?;
        if data.len() != rows {
            return Err(bad(format!("expected {rows} rows, found {}", data.len())));
        }
        let mut m = Matrix::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            let row = array(row, "matrix row")?;
            if row.len() != cols {
                return Err(bad(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, T::from_json(x)?);
            }
        }
        Ok(m)
    }
}

impl<T: JsonScalar> ToJson for BlockLinearMap<T> {
    fn to_json(&self) -> Value {
        let s = self.s();
        let images: Vec<Value> = (0..s).map(|i| Value::Array((0..s).map(|j| self.image(i, j).to_json()).collect())).collect();
        json!({"s": s, "p": self.p(), "q": self.q(), "images": images})
    }
}

impl<T: JsonScalar> FromJson for BlockLinearMap<T> {
    fn from_json(v: &Value) -> Result<Self> {
        let (s, p, q) = (usize_field(v, "s")?, usize_field(v, "p")?, usize_field(v, "q")?);
        let rows = array(field(v, "images")?, "images")?;
        let mut images = Vec::with_capacity(s * s);
        for row in rows {
            images.extend(vec_from_json::<Matrix<T>>(row, "images row")?);
        }
        BlockLinearMap::new(s, p, q, images)
    }
}

impl<T: JsonScalar> ToJson for FmRealization<T> {
    fn to_json(&self) -> Value {
        json!({
            "d": self.num_vars(),
            "s": self.s(),
            "centre": vec_to_json(self.centre()),
            "L": self.l(),
            "D": self.d().to_json(),
            "C": self.c().to_json(),
            "A": vec_to_json(self.a()),
            "B": vec_to_json(self.b()),
        })
    }
}

impl<T: JsonScalar> FromJson for FmRealization<T> {
    fn from_json(v: &Value) -> Result<Self> {
        let r = FmRealization::new(
            vec_from_json(field(v, "centre")?, "centre")?,
            Matrix::from_json(field(v, "D")?)?,
            Matrix::from_json(field(v, "C")?)?,
            vec_from_json(field(v, "A")?, "A")?,
            vec_from_json(field(v, "B")?, "B")?,
        )?;
        for (key, expected) in [("d", r.num_vars()), ("s", r.s()), ("L", r.l())] {
            if let Some(x) = v.get(key) {
                if x.as_u64() != Some(expected as u64) {
                    return Err(bad(format!("field \"{key}\" disagrees with the data")));
                }
            }
        }
        Ok(r)
    }
}

impl<T: JsonScalar> ToJson for DescriptorRealization<T> {
    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), json!(match self.kind {
            DescriptorKind::Hermitian { .. } => "hermitian",
            DescriptorKind::General { .. } => "general",
        }));
        obj.insert("d".into(), json!(self.a.len()));
        obj.insert("s".into(), json!(self.s()));
        obj.insert("centre".into(), vec_to_json(&self.centre));
        obj.insert("L".into(), json!(self.l()));
        obj.insert("C".into(), self.c.to_json());
        obj.insert("A".into(), vec_to_json(&self.a));
        match &self.kind {
            DescriptorKind::Hermitian { d, w } => {
                obj.insert("D".into(), d.to_json());
                obj.insert("J".into(), scalars_to_json(w));
            }
            DescriptorKind::General { b } => {
                obj.insert("B".into(), b.to_json());
            }
        }
        Value::Object(obj)
    }
}

impl<T: JsonScalar> FromJson for DescriptorRealization<T> {
    fn from_json(v: &Value) -> Result<Self> {
        let centre: Vec<Matrix<T>> = vec_from_json(field(v, "centre")?, "centre")?;
        let c = Matrix::from_json(field(v, "C")?)?;
        let a: Vec<BlockLinearMap<T>> = vec_from_json(field(v, "A")?, "A")?;
        let kind = match v.get("B") {
            Some(b) => DescriptorKind::General { b: Matrix::from_json(b)? },
            None => DescriptorKind::Hermitian { d: Matrix::from_json(field(v, "D")?)?, w: scalars_from_json(field(v, "J")?, "J")? },
        };
        let l = c.cols();
        if centre.is_empty() || centre.len() != a.len() || a.iter().any(|m| m.p() != l || m.q() != l || m.s() != centre[0].rows()) {
            return Err(NcError::Dimension("descriptor data is inconsistent".into()));
        }
        Ok(DescriptorRealization { centre, c, a, kind })
    }
}

fn word_to_json(w: &[usize]) -> Value {
    json!(w.iter().map(|x| x + 1).collect::<Vec<_>>())
}

fn word_from_json(v: &Value) -> Result<Vec<usize>> {
    array(v, "word")?
        .iter()
        .map(|x| x.as_u64().filter(|&x| x >= 1).map(|x| x as usize - 1).ok_or_else(|| bad("word letters are positive integers")))
        .collect()
}

impl<T: JsonScalar> ToJson for TaylorTable<T> {
    fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .words()
            .iter()
            .map(|w| json!({"word": word_to_json(w), "values": vec_to_json(self.get(w))}))
            .collect();
        json!({"s": self.s, "d": self.d, "order": self.order, "centre": vec_to_json(&self.centre), "coefficients": coeffs})
    }
}

impl<T: JsonScalar> FromJson for TaylorTable<T> {
    fn from_json(v: &Value) -> Result<Self> {
        let (s, d, order) = (usize_field(v, "s")?, usize_field(v, "d")?, usize_field(v, "order")?);
        let entries = array(field(v, "coefficients")?, "coefficients")?;
        let words = words_up_to(d, order);
        if entries.len() != words.len() {
            return Err(bad("coefficient list does not cover every word"));
        }
        let mut coeffs = Vec::with_capacity(words.len());
        for (w, entry) in words.iter().zip(entries) {
            if &word_from_json(field(entry, "word")?)? != w {
                return Err(bad("coefficients are not in length-lexicographic word order"));
            }
            coeffs.push(vec_from_json(field(entry, "values")?, "values")?);
        }
        Ok(TaylorTable { s, d, order, centre: vec_from_json(field(v, "centre")?, "centre")?, coeffs })
    }
}

impl<T: JsonScalar> ToJson for KalmanReport<T> {
    fn to_json(&self) -> Value {
        json!({
            "original_L": self.original_l,
            "dim_controllable": self.dim_c,
            "dim_unobservable": self.dim_no,
            "dim_intersection": self.dim_intersection,
            "reduced_L": self.reduced_l,
            "basis_change": self.basis_change.to_json(),
        })
    }
}

impl<T: JsonScalar> FromJson for KalmanReport<T> {
    fn from_json(v: &Value) -> Result<Self> {
        Ok(KalmanReport {
            original_l: usize_field(v, "original_L")?,
            dim_c: usize_field(v, "dim_controllable")?,
            dim_no: usize_field(v, "dim_unobservable")?,
            dim_intersection: usize_field(v, "dim_intersection")?,
            reduced_l: usize_field(v, "reduced_L")?,
            basis_change: Matrix::from_json(field(v, "basis_change")?)?,
        })
    }
}

fn opt_to_json<X>(x: &Option<X>, f: impl Fn(&X) -> Value) -> Value {
    x.as_ref().map_or(Value::Null, f)
}

fn opt_from_json<X>(v: &Value, key: &str, f: impl Fn(&Value) -> Result<X>) -> Result<Option<X>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => f(x).map(Some),
    }
}

impl<T: JsonScalar> ToJson for EquivalenceVerdict<T> {
    fn to_json(&self) -> Value {
        json!({
            "verdict": serde_json::to_value(self.verdict).expect("unit enum"),
            "equivalent": self.is_equivalent(),
            "common_centre": opt_to_json(&self.common_centre, |c| vec_to_json(c)),
            "similarity": opt_to_json(&self.similarity, ToJson::to_json),
            "separating_point": opt_to_json(&self.separating_point, |p| json!({
                "point": vec_to_json(&p.point), "left": p.left.to_json(), "right": p.right.to_json(),
            })),
            "taylor_mismatch": opt_to_json(&self.taylor_mismatch, |m| json!({
                "word": word_to_json(&m.word), "tuple": m.tuple, "left": m.left.to_json(), "right": m.right.to_json(),
            })),
            "dimensions": opt_to_json(&self.dimensions, |(a, b)| json!([a, b])),
        })
    }
}

impl<T: JsonScalar> FromJson for EquivalenceVerdict<T> {
    fn from_json(v: &Value) -> Result<Self> {
        Ok(EquivalenceVerdict {
            verdict: serde_json::from_value(field(v, "verdict")?.clone()).map_err(|e| bad(e.to_string()))?,
            common_centre: opt_from_json(v, "common_centre", |x| vec_from_json(x, "common_centre"))?,
            similarity: opt_from_json(v, "similarity", Matrix::from_json)?,
            separating_point: opt_from_json(v, "separating_point", |x| {
                Ok(SeparatingPoint {
                    point: vec_from_json(field(x, "point")?, "point")?,
                    left: Matrix::from_json(field(x, "left")?)?,
                    right: Matrix::from_json(field(x, "right")?)?,
                })
            })?,
            taylor_mismatch: opt_from_json(v, "taylor_mismatch", |x| {
                Ok(TaylorMismatch {
                    word: word_from_json(field(x, "word")?)?,
                    tuple: usize_field(x, "tuple")?,
                    left: Matrix::from_json(field(x, "left")?)?,
                    right: Matrix::from_json(field(x, "right")?)?,
                })
            })?,
            dimensions: opt_from_json(v, "dimensions", |x| match array(x, "dimensions")?.as_slice() {
                [a, b] => Ok((
                    a.as_u64().ok_or_else(|| bad("dimension"))? as usize,
                    b.as_u64().ok_or_else(|| bad("dimension"))? as usize,
                )),
                _ => Err(bad("dimensions is a pair")),
            })?,
        })
    }
}

impl<T: JsonScalar> ToJson for HermitianStructure<T> {
    fn to_json(&self) -> Value {
        json!({
            "centre": vec_to_json(&self.centre),
            "D": self.d.to_json(),
            "S": self.s_mat.to_json(),
            "T": self.t.to_json(),
            "J": scalars_to_json(&self.w),
            "C_check": self.c_check.to_json(),
            "A_hat": vec_to_json(&self.a_hat),
            "A_check": vec_to_json(&self.a_check),
        })
    }
}

impl<T: JsonScalar> FromJson for HermitianStructure<T> {
    fn from_json(v: &Value) -> Result<Self> {
        Ok(HermitianStructure {
            centre: vec_from_json(field(v, "centre")?, "centre")?,
            d: Matrix::from_json(field(v, "D")?)?,
            s_mat: Matrix::from_json(field(v, "S")?)?,
            t: Matrix::from_json(field(v, "T")?)?,
            w: scalars_from_json(field(v, "J")?, "J")?,
            c_check: Matrix::from_json(field(v, "C_check")?)?,
            a_hat: vec_from_json(field(v, "A_hat")?, "A_hat")?,
            a_check: vec_from_json(field(v, "A_check")?, "A_check")?,
        })
    }
}

macro_rules! serde_backed {
    ($($ty:ty),*) => {$(
        impl ToJson for $ty {
            fn to_json(&self) -> Value {
                serde_json::to_value(self).expect("plain data serializes")
            }
        }
        impl FromJson for $ty {
            fn from_json(v: &Value) -> Result<Self> {
                <$ty as Deserialize>::deserialize(v).map_err(|e| bad(e.to_string()))
            }
        }
    )*};
}

serde_backed!(CohnReport, BridgeReport, KernelImageReport, Verdict);

/// Reads a tuple of matrices: either a JSON array of matrices or an object
/// with a `"centre"` or `"point"` array.
pub fn read_tuple<T: JsonScalar>(text: &str) -> Result<Vec<Matrix<T>>> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let list = match &v {
        Value::Array(_) => &v,
        Value::Object(o) => o.get("centre").or_else(|| o.get("point")).ok_or_else(|| bad("expected \"centre\" or \"point\""))?,
        _ => return Err(bad("expected an array of matrices")),
    };
    vec_from_json(list, "matrix tuple")
}

/// Serializes a tuple of matrices as a JSON array.
pub fn tuple_to_json<T: JsonScalar>(xs: &[Matrix<T>]) -> Value {
    vec_to_json(xs)
}
