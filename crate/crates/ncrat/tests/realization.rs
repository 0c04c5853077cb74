mod common;

use common::*;
use ncrat::field::{q, Field, Q};
use ncrat::{linalg, sampling, synthesize, taylor_table, BlockLinearMap, FmRealization, Matrix, NcError};
use proptest::prelude::*;

/// An `r×c` integer matrix with the listed nonzero entries.
fn sparse(r: usize, c: usize, entries: &[(usize, usize, i64)]) -> Matrix<Q> {
    let mut out = Matrix::zeros(r, c);
    for &(i, j, v) in entries {
        out.set(i, j, q(v, 1));
    }
    out
}

fn x1() -> FmRealization<Q> {
    FmRealization::synth_var(0, &yc()).unwrap()
}

fn x2() -> FmRealization<Q> {
    FmRealization::synth_var(1, &yc()).unwrap()
}

fn minus_one() -> Matrix<Q> {
    Matrix::scalar(2, q(-1, 1))
}

#[test]
fn variable_tuple_matches_the_listing() {
    let r1 = x1();
    let expected = FmRealization::new(
        yc(),
        m(&[&[0, 1], &[1, 0]]),
        Matrix::identity(2),
        vec![BlockLinearMap::zero(2, 2, 2), BlockLinearMap::zero(2, 2, 2)],
        vec![BlockLinearMap::identity(2), BlockLinearMap::zero(2, 2, 2)],
    )
    .unwrap();
    assert_eq!(r1, expected);
    assert_eq!(r1.evaluate(&yc()).unwrap(), yc()[0]);
    let mut rng = sampling::rng(1);
    let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 6, 4);
    assert_eq!(r1.evaluate(&xs).unwrap(), xs[0]);
    assert!(matches!(FmRealization::synth_var(2, &yc()), Err(NcError::VariableIndex { .. })));
}

#[test]
fn product_tuple_matches_the_listing() {
    let r3 = x1().mul(&x2()).unwrap();
    let expected = FmRealization::new(
        yc(),
        m(&[&[0, -1], &[1, 0]]),
        m(&[&[1, 0, 0, 1], &[0, 1, 1, 0]]),
        vec![kr(&sparse(4, 4, &[(0, 2, 1), (1, 3, 1)])), BlockLinearMap::zero(2, 4, 4)],
        vec![kr(&sparse(4, 2, &[(0, 0, 1), (1, 1, -1)])), kr(&sparse(4, 2, &[(2, 0, 1), (3, 1, 1)]))],
    )
    .unwrap();
    assert_eq!(r3, expected);
}

#[test]
fn negated_product_tuple_matches_the_listing() {
    let r4 = x2().mul(&x1()).unwrap().scale_left(&minus_one()).unwrap();
    let expected = FmRealization::new(
        yc(),
        m(&[&[0, -1], &[1, 0]]),
        m(&[&[-1, 0, -1, 0], &[0, -1, 0, 1]]),
        vec![BlockLinearMap::zero(2, 4, 4), kr(&sparse(4, 4, &[(0, 2, 1), (1, 3, 1)]))],
        vec![kr(&sparse(4, 2, &[(2, 0, 1), (3, 1, 1)])), kr(&sparse(4, 2, &[(0, 1, 1), (1, 0, 1)]))],
    )
    .unwrap();
    assert_eq!(r4, expected);
    assert_eq!(synthesize(&e("-(x2*x1)"), &yc()).unwrap(), expected);
}

#[test]
fn commutator_tuple_matches_the_listing() {
    let r5 = synthesize(&e("x1*x2 - x2*x1"), &yc()).unwrap();
    let expected = FmRealization::new(
        yc(),
        m(&[&[0, -2], &[2, 0]]),
        m(&[&[1, 0, 0, 1, -1, 0, -1, 0], &[0, 1, 1, 0, 0, -1, 0, 1]]),
        vec![kr(&sparse(8, 8, &[(0, 2, 1), (1, 3, 1)])), kr(&sparse(8, 8, &[(4, 6, 1), (5, 7, 1)]))],
        vec![
            kr(&sparse(8, 2, &[(0, 0, 1), (1, 1, -1), (6, 0, 1), (7, 1, 1)])),
            kr(&sparse(8, 2, &[(2, 0, 1), (3, 1, 1), (4, 1, 1), (5, 0, 1)])),
        ],
    )
    .unwrap();
    assert_eq!(r5, expected);
    assert_eq!(synthesize(&rcomm(), &yc()).unwrap(), golden_l8());
    assert_eq!(golden_l8(), r5.inv().unwrap());
}

#[test]
fn domain_of_the_minimal_realization_is_the_commutator_condition() {
    let r = golden_l6();
    let mut rng = sampling::rng(2);
    let mut both = [0usize; 2];
    for n in [2usize, 4] {
        for _ in 0..100 {
            let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, n, 2);
            let comm = &(&xs[0] * &xs[1]) - &(&xs[1] * &xs[0]);
            let in_dom = !linalg::determinant(&comm).is_zero();
            assert_eq!(r.dom_contains(&xs).unwrap(), in_dom);
            both[usize::from(in_dom)] += 1;
        }
    }
    assert!(both[0] > 0 && both[1] > 0, "both outcomes should be sampled: {both:?}");
    assert!(r.dom_contains(&[Matrix::identity(3), Matrix::identity(3)]).is_err());
}

#[test]
fn evaluation_examples() {
    let r = golden_l6();
    for mm in 1..=3 {
        let centre: Vec<Matrix<Q>> = yc().iter().map(|y| Matrix::identity(mm).kron(y)).collect();
        assert!(r.dom_contains(&centre).unwrap());
        assert_eq!(r.evaluate(&centre).unwrap(), Matrix::identity(mm).kron(r.d()));
    }
    let zero_a = FmRealization::new(
        yc(),
        r.d().clone(),
        r.c().clone(),
        vec![BlockLinearMap::zero(2, 6, 6), BlockLinearMap::zero(2, 6, 6)],
        r.b().to_vec(),
    )
    .unwrap();
    let mut rng = sampling::rng(3);
    for _ in 0..10 {
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 5);
        assert!(zero_a.dom_contains(&xs).unwrap());
    }
    let mut compared = 0;
    while compared < 20 {
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 2, 3);
        if let Ok(v) = rcomm().eval(&xs) {
            assert_eq!(r.evaluate(&xs).unwrap(), v);
            compared += 1;
        }
    }
    assert_eq!(r.evaluate(&[Matrix::identity(2), Matrix::identity(2)]), Err(NcError::NotInDomain));
}

#[test]
fn constants_and_scalings() {
    let mut rng = sampling::rng(4);
    let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 4);
    let three = FmRealization::synth_const(q(3, 1), &yc()).unwrap();
    assert_eq!(three.l(), 1);
    assert_eq!(three.evaluate(&xs).unwrap(), Matrix::scalar(4, q(3, 1)));
    let zero = FmRealization::synth_const(q(0, 1), &yc()).unwrap();
    assert!(zero.evaluate(&xs).unwrap().is_zero());
    let half = FmRealization::synth_const(q(2, 1), &yc()).unwrap().inv().unwrap();
    assert_eq!(half.evaluate(&xs).unwrap(), Matrix::scalar(4, q(1, 2)));
    assert!(FmRealization::synth_const(q(0, 1), &yc()).unwrap().inv().is_err());

    let r = golden_l6();
    assert_eq!(r.scale_left(&Matrix::identity(2)).unwrap(), r);
    assert_eq!(r.scale_right(&Matrix::identity(2)).unwrap(), r);
    let k = m(&[&[1, 2], &[0, 1]]);
    let k4 = Matrix::identity(2).kron(&k);
    let mut checked = 0;
    while checked < 5 {
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 3);
        let Ok(v) = r.evaluate(&xs) else { continue };
        assert_eq!(r.scale_left(&k).unwrap().evaluate(&xs).unwrap(), &k4 * &v);
        assert_eq!(r.scale_right(&k).unwrap().evaluate(&xs).unwrap(), &v * &k4);
        assert!(r.scale_left(&Matrix::zeros(2, 2)).unwrap().evaluate(&xs).unwrap().is_zero());
        checked += 1;
    }
    assert!(r.scale_left(&Matrix::identity(3)).is_err());
}

#[test]
fn combinators_reject_mismatched_centres() {
    let other = FmRealization::synth_var(0, &yh()).unwrap();
    assert_eq!(x1().add(&other), Err(NcError::CentreMismatch));
    assert_eq!(x1().mul(&other), Err(NcError::CentreMismatch));
}

#[test]
fn synthesis_rejects_centres_outside_the_domain() {
    let ones: Vec<Matrix<Q>> = vec![Matrix::identity(2), Matrix::identity(2)];
    assert_eq!(synthesize(&rcomm(), &ones), Err(NcError::CentreNotInDomain));
    assert_eq!(synthesize(&hfix(), &yc()), Err(NcError::CentreNotInDomain));
}

#[test]
fn realization_coefficients_match_the_expression_oracle() {
    let r = golden_l8();
    assert_eq!(r.tt_coefficient(&[], &[]).unwrap(), *r.d());
    assert_eq!(r.taylor_table(3).unwrap(), taylor_table(&rcomm(), &yc(), 3).unwrap());
    let no_a = FmRealization::new(
        yc(),
        r.d().clone(),
        r.c().clone(),
        vec![BlockLinearMap::zero(2, 8, 8), BlockLinearMap::zero(2, 8, 8)],
        r.b().to_vec(),
    )
    .unwrap();
    let i2 = Matrix::identity(2);
    assert!(no_a.tt_coefficient(&[0, 1], &[i2.clone(), i2.clone()]).unwrap().is_zero());
    assert!(r.tt_coefficient(&[0, 1], &[i2]).is_err());
}

#[test]
fn float_realization_tracks_exact_evaluation() {
    let r = golden_l6();
    let rf = r.to_f64();
    let mut rng = sampling::rng(5);
    let mut checked = 0;
    while checked < 10 {
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 3);
        let Ok(v) = r.evaluate(&xs) else { continue };
        let xf: Vec<Matrix<f64>> = xs.iter().map(Matrix::to_f64).collect();
        assert!(rf.evaluate(&xf).unwrap().approx_eq(&v.to_f64()));
        checked += 1;
    }
}

/// Fixture expressions with centres in their domains.
fn fixtures() -> Vec<(ncrat::Expr, Vec<Matrix<Q>>)> {
    vec![
        (rcomm(), yc()),
        (hfix(), yh()),
        (hua_left(), yh()),
        (hua_right(), yh()),
        (e("x1*x2*x1 - 2*x2 + 1/3"), yc()),
        (e("(1 + x1*(x2 - x1)^-1)^-1 * x2"), yc()),
    ]
}

/// Every point in the domain of the expression is in the domain of its
/// realization, and the values agree there.
#[test]
fn synthesis_contains_the_expression_domain() {
    let mut rng = sampling::rng(6);
    for (ex, y) in fixtures() {
        let r = synthesize(&ex, &y).unwrap();
        assert_eq!(*r.d(), ex.eval(&y).unwrap());
        let mut in_dom = 0;
        for mm in 1..=2 {
            for _ in 0..100 {
                let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 2 * mm, 2);
                if let Ok(v) = ex.eval(&xs) {
                    assert!(r.dom_contains(&xs).unwrap(), "{ex}");
                    assert_eq!(r.evaluate(&xs).unwrap(), v, "{ex}");
                    in_dom += 1;
                }
            }
        }
        assert!(in_dom > 20, "{ex}: only {in_dom} domain points sampled");
    }
}

#[test]
fn random_polynomials_agree_at_random_points() {
    let mut rng = sampling::rng(7);
    let words: [&[usize]; 6] = [&[0, 1, 1], &[1, 0, 0], &[0, 0, 0], &[1], &[0, 1], &[]];
    let mut ex = ncrat::Expr::int(0);
    for (k, w) in words.iter().enumerate() {
        let mut term = ncrat::Expr::int(k as i64 - 2);
        for &v in *w {
            term = term.mul(ncrat::Expr::x(v + 1));
        }
        ex = ex.add(term);
    }
    let r = synthesize(&ex, &yc()).unwrap();
    for _ in 0..50 {
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 4);
        assert_eq!(r.evaluate(&xs).unwrap(), ex.eval(&xs).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evaluation_respects_direct_sums_and_similarity(seed in arb_seed()) {
        let r = golden_l6();
        let mut rng = sampling::rng(seed);
        let x: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 2, 3);
        let z: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 3);
        let sum: Vec<Matrix<Q>> = x.iter().zip(&z).map(|(a, b)| a.direct_sum(b)).collect();
        match (r.evaluate(&x), r.evaluate(&z)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(r.evaluate(&sum).unwrap(), a.direct_sum(&b)),
            _ => prop_assert!(!r.dom_contains(&sum).unwrap()),
        }
        let t: Matrix<Q> = sampling::invertible_matrix(&mut rng, 4, 2);
        let ti = linalg::inverse(&t).unwrap();
        let moved: Vec<Matrix<Q>> = z.iter().map(|a| &(&t * a) * &ti).collect();
        match r.evaluate(&z) {
            Ok(v) => prop_assert_eq!(r.evaluate(&moved).unwrap(), &(&t * &v) * &ti),
            Err(_) => prop_assert!(!r.dom_contains(&moved).unwrap()),
        }
    }

    #[test]
    fn combinators_act_pointwise(seed in arb_seed()) {
        let mut rng = sampling::rng(seed);
        let (p, qq) = (synthesize(&hua_left(), &yh()).unwrap(), synthesize(&e("x1*x2 + 2"), &yh()).unwrap());
        let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 4, 3);
        if let (Ok(a), Ok(b)) = (p.evaluate(&xs), qq.evaluate(&xs)) {
            prop_assert_eq!(p.add(&qq).unwrap().evaluate(&xs).unwrap(), &a + &b);
            prop_assert_eq!(p.mul(&qq).unwrap().evaluate(&xs).unwrap(), &a * &b);
            let one = FmRealization::synth_const(q(1, 1), &yh()).unwrap();
            prop_assert_eq!(p.mul(&one).unwrap().evaluate(&xs).unwrap(), a.clone());
            let zero = FmRealization::synth_const(q(0, 1), &yh()).unwrap();
            prop_assert_eq!(p.add(&zero).unwrap().evaluate(&xs).unwrap(), a.clone());
            if linalg::is_invertible(&a) {
                let inv = p.inv().unwrap();
                prop_assert_eq!(inv.evaluate(&xs).unwrap(), linalg::inverse(&a).unwrap());
                prop_assert_eq!(inv.inv().unwrap().evaluate(&xs).unwrap(), a);
            }
        }
    }
}
