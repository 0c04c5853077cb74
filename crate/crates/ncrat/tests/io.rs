mod common;

use common::*;
use ncrat::algebra::{cohn_check, matrix_algebra_bridge, BridgeReport, CohnReport};
use ncrat::field::{q, Q};
use ncrat::functions::Verdict;
use ncrat::hermitian::{descriptor_form, fm_to_descriptor, kernel_image_check, structure_matrix, symmetric_form, KernelImageReport};
use ncrat::io::{read_tuple, tuple_to_json};
use ncrat::{
    equivalent, kalman_reduce, minimal_realization, synthesize, taylor_table, BlockLinearMap, DescriptorRealization,
    EquivalenceVerdict, FmRealization, FromJson, HermitianStructure, KalmanReport, Matrix, MatrixAlg, SearchOptions,
    TaylorTable, ToJson, UpperTriangularAlg,
};
use num_complex::Complex64;
use proptest::prelude::*;
use serde_json::{json, Value};

fn round_trip<X: ToJson + FromJson + PartialEq + std::fmt::Debug>(x: &X) {
    let text = x.to_json_string();
    assert_eq!(&X::from_json_str(&text).unwrap(), x, "round trip failed for {text}");
}

/// Every scalar leaf of a JSON value.
fn leaves(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Array(xs) => xs.iter().for_each(|x| leaves(x, out)),
        Value::Object(o) => o.values().for_each(|x| leaves(x, out)),
        other => out.push(other.clone()),
    }
}

#[test]
fn matrices_use_rational_strings() {
    let mat = mq(6, &[&[3, -4], &[0, 12]]);
    assert_eq!(mat.to_json(), json!({"rows": 2, "cols": 2, "data": [["1/2", "-2/3"], ["0", "2"]]}));
    round_trip(&mat);
    // integer strings and bare integers both read as rationals
    let read = Matrix::<Q>::from_json_str(r#"{"rows":1,"cols":3,"data":[["4/6", "-5", 7]]}"#).unwrap();
    assert_eq!(read, Matrix::from_fn(1, 3, |_, j| [q(2, 3), q(-5, 1), q(7, 1)][j].clone()));
    // empty matrices
    round_trip(&Matrix::<Q>::zeros(0, 3));
    // floats are numbers, complex numbers are pairs
    let f = Matrix::from_fn(2, 1, |i, _| 0.25 * (i as f64 + 1.0));
    assert_eq!(f.to_json(), json!({"rows": 2, "cols": 1, "data": [[0.25], [0.5]]}));
    round_trip(&f);
    let z = Matrix::from_fn(1, 2, |_, j| Complex64::new(j as f64, -1.5));
    assert_eq!(z.to_json()["data"], json!([[[0.0, -1.5], [1.0, -1.5]]]));
    round_trip(&z);
}

#[test]
fn malformed_matrices_are_rejected() {
    for text in [
        r#"{"rows":2,"cols":1,"data":[["1"]]}"#,
        r#"{"rows":1,"cols":1,"data":[["1/0"]]}"#,
        r#"{"rows":1,"cols":1,"data":[["x"]]}"#,
        r#"{"rows":1,"cols":1,"data":[[0.5]]}"#,
        r#"{"rows":1,"data":[["1"]]}"#,
        r#"[1, 2"#,
    ] {
        assert!(Matrix::<Q>::from_json_str(text).is_err(), "accepted {text}");
    }
}

#[test]
fn realization_schema() {
    let r = golden_l8();
    let v = r.to_json();
    assert_eq!((v["d"].clone(), v["s"].clone(), v["L"].clone()), (json!(2), json!(2), json!(8)));
    assert_eq!(v["D"]["data"], json!([["0", "1/2"], ["-1/2", "0"]]));
    assert_eq!(v["A"].as_array().unwrap().len(), 2);
    assert_eq!(v["centre"], tuple_to_json(&yc()));
    round_trip(&r);
    round_trip(&r.to_f64());
    round_trip(&r.a()[1]);
    // the size fields are checked against the data
    let mut wrong = v.clone();
    wrong["L"] = json!(7);
    assert!(FmRealization::<Q>::from_json(&wrong).is_err());
    let mut missing = v;
    missing.as_object_mut().unwrap().remove("C");
    assert!(FmRealization::<Q>::from_json(&missing).is_err());
}

#[test]
fn block_maps_keep_every_image() {
    let map = kr(&m(&[&[1, 0], &[0, -1], &[0, 0], &[0, 0]]));
    round_trip(&map);
    let back = BlockLinearMap::<Q>::from_json(&map.to_json()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(back.image(i, j), map.image(i, j));
        }
    }
}

#[test]
fn taylor_tables_use_one_based_words() {
    let table = taylor_table(&e("x1*x2"), &yc(), 2).unwrap();
    round_trip(&table);
    let v = table.to_json();
    let words: Vec<Value> = v["coefficients"].as_array().unwrap().iter().map(|c| c["word"].clone()).collect();
    assert_eq!(words, vec![json!([]), json!([1]), json!([2]), json!([1, 1]), json!([1, 2]), json!([2, 1]), json!([2, 2])]);
    // each word carries one coefficient per tuple of matrix units
    assert_eq!(v["coefficients"][4]["values"].as_array().unwrap().len(), 16);
    let text = table.to_json_string();
    let back = TaylorTable::<Q>::from_json_str(&text).unwrap();
    assert_eq!(back.get(&[0, 1]), table.get(&[0, 1]));
}

#[test]
fn reports_and_verdicts_round_trip() {
    let big = synthesize(&rcomm(), &yc()).unwrap();
    let (_, report) = kalman_reduce(&big).unwrap();
    round_trip(&report);
    assert_eq!(KalmanReport::<Q>::from_json(&report.to_json()).unwrap().reduced_l, 6);

    let opts = SearchOptions::with_seed(7);
    let same = equivalent::<Q>(&hua_left(), &hua_right(), 2, &opts).unwrap();
    assert!(same.is_equivalent());
    round_trip(&same);
    let negated = e("-(x1*x2 - x2*x1)^-1");
    let differ = equivalent::<Q>(&rcomm(), &negated, 2, &opts).unwrap();
    assert!(!differ.is_equivalent());
    round_trip(&differ);
    round_trip(&EquivalenceVerdict::<f64>::from_json(&differ.to_json()).unwrap());

    for verdict in [Verdict::Equivalent, Verdict::NotEquivalent, Verdict::Inconclusive] {
        round_trip(&verdict);
    }
    let r = minimal_realization(&rcomm(), &yc()).unwrap();
    round_trip(&matrix_algebra_bridge(&r, &sampling_point(), 1).unwrap());
    let cohn = cohn_check::<Q, _>(&hua_left(), &hua_right(), &UpperTriangularAlg { n: 2 }, 5, &opts).unwrap();
    round_trip(&cohn);
    assert_eq!(CohnReport::from_json(&cohn.to_json()).unwrap().algebra, "ut:2");
    let cohn = cohn_check::<Q, _>(&hua_left(), &hua_right(), &MatrixAlg { n: 2 }, 5, &opts).unwrap();
    round_trip(&cohn);
    round_trip(&BridgeReport { algebra_side_in_domain: false, matrix_side_in_domain: false, values_agree: true });
}

fn sampling_point() -> Vec<Matrix<Q>> {
    vec![m(&[&[1, 2], &[0, 1]]), m(&[&[0, 1], &[1, 3]])]
}

#[test]
fn hermitian_and_descriptor_types_round_trip() {
    let r = minimal_realization(&hfix(), &yh()).unwrap();
    let s = structure_matrix(&r).unwrap();
    let report = kernel_image_check(&s, &r);
    round_trip(&report);
    assert_eq!(KernelImageReport::from_json(&report.to_json()).unwrap(), report);
    let h = symmetric_form(&r, &s).unwrap();
    round_trip(&h);
    let hf = symmetric_form(&r.to_f64(), &s.to_f64()).unwrap().to_signature();
    round_trip(&hf);
    let desc = descriptor_form(&h, &Matrix::identity(2)).unwrap();
    round_trip(&desc);
    let v = desc.to_json();
    assert_eq!(v["kind"], json!("hermitian"));
    assert!(v.get("J").is_some() && v.get("B").is_none());

    let general = fm_to_descriptor(&minimal_realization(&rcomm(), &yc()).unwrap()).unwrap();
    round_trip(&general);
    let v = general.to_json();
    assert_eq!(v["kind"], json!("general"));
    assert!(v.get("B").is_some() && v.get("J").is_none());
    assert_eq!(v["L"], json!(8));
    assert_eq!(HermitianStructure::<Q>::from_json(&h.to_json()).unwrap().s_mat, s);
    let mut stripped = general.to_json();
    stripped.as_object_mut().unwrap().remove("B");
    assert!(DescriptorRealization::<Q>::from_json(&stripped).is_err());
}

#[test]
fn exact_values_are_written_as_strings_everywhere() {
    let r = minimal_realization(&hfix(), &yh()).unwrap();
    let h = symmetric_form(&r, &structure_matrix(&r).unwrap()).unwrap();
    for v in [r.to_json(), h.to_json(), taylor_table(&rcomm(), &yc(), 1).unwrap().to_json()] {
        let mut out = Vec::new();
        leaves(&v, &mut out);
        for leaf in &out {
            match leaf {
                Value::String(text) => assert!(ncrat::field::parse_q(text).is_some(), "odd leaf {text}"),
                Value::Number(n) => assert!(n.is_u64(), "non-integer number {n}"),
                other => panic!("unexpected leaf {other}"),
            }
        }
    }
}

#[test]
fn tuples() {
    let text = tuple_to_json(&yc()).to_string();
    assert_eq!(read_tuple::<Q>(&text).unwrap(), yc());
    let wrapped = json!({"centre": tuple_to_json(&yh())}).to_string();
    assert_eq!(read_tuple::<Q>(&wrapped).unwrap(), yh());
    let point = json!({"point": tuple_to_json(&yh())}).to_string();
    assert_eq!(read_tuple::<f64>(&point).unwrap(), yh().iter().map(Matrix::to_f64).collect::<Vec<_>>());
    assert!(read_tuple::<Q>(r#"{"other": []}"#).is_err());
    assert!(read_tuple::<Q>("3").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_matrices_round_trip(num in arb_matrix(3, 2, 50), den in 1i64..40) {
        let mat = num.scale(&q(1, den));
        let text = mat.to_json_string();
        prop_assert_eq!(Matrix::<Q>::from_json_str(&text).unwrap(), mat.clone());
        // each entry is a lowest-terms "p/q" or integer string
        let v = mat.to_json();
        for (i, row) in v["data"].as_array().unwrap().iter().enumerate() {
            for (j, leaf) in row.as_array().unwrap().iter().enumerate() {
                let s = leaf.as_str().unwrap();
                prop_assert_eq!(s, mat.get(i, j).to_string());
                if let Some((p, qd)) = s.split_once('/') {
                    let (p, qd): (i64, i64) = (p.parse().unwrap(), qd.parse().unwrap());
                    prop_assert!(qd > 1);
                    prop_assert_eq!(num_integer::gcd(p, qd), 1);
                }
            }
        }
    }

    #[test]
    fn random_realizations_round_trip(seed in any::<u64>()) {
        let mut rng = ncrat::sampling::rng(seed);
        let images = |rng: &mut ncrat::sampling::SeededRng, p, qc| {
            BlockLinearMap::new(2, p, qc, (0..4).map(|_| ncrat::sampling::int_matrix(rng, p, qc, 3)).collect()).unwrap()
        };
        let a = vec![images(&mut rng, 3, 3), images(&mut rng, 3, 3)];
        let b = vec![images(&mut rng, 3, 2), images(&mut rng, 3, 2)];
        let r = FmRealization::new(yc(), ncrat::sampling::int_matrix(&mut rng, 2, 2, 3), ncrat::sampling::int_matrix(&mut rng, 2, 3, 3), a, b).unwrap();
        let back = FmRealization::<Q>::from_json_str(&r.to_json_string()).unwrap();
        prop_assert_eq!(back, r);
    }
}
