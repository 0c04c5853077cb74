mod common;

use common::*;
use ncrat::reduction::{
    controllability_matrix, controllability_space, is_controllable, is_minimal, is_observable, observability_matrix,
    unobservable_space,
};
use ncrat::subspace::Subspace;
use ncrat::{
    kalman_reduce, linalg, sampling, similarity_between, synthesize, BlockLinearMap, FmRealization, Matrix, NcError,
    Similarity, Q,
};
use proptest::prelude::*;

fn col(v: &[i64]) -> Matrix<Q> {
    Matrix::from_fn(v.len(), 1, |i, _| ncrat::field::q(v[i], 1))
}

fn span(cols: &[Matrix<Q>]) -> Subspace<Q> {
    let refs: Vec<&Matrix<Q>> = cols.iter().collect();
    Subspace::span(&Matrix::hstack(cols[0].rows(), &refs))
}

/// A random realization with `L = 3` whose input maps only reach the first
/// `k` state coordinates and whose `A` maps keep them invariant, hidden by a
/// random change of basis. It is controllable only when `k = 3` (generically).
fn layered(rng: &mut sampling::SeededRng, k: usize) -> FmRealization<Q> {
    let (s, l) = (2, 3);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for _ in 0..2 {
        let a_images = (0..s * s)
            .map(|_| {
                let mut x: Matrix<Q> = sampling::int_matrix(rng, l, l, 2);
                for i in k..l {
                    for j in 0..k {
                        x.set(i, j, ncrat::field::q(0, 1));
                    }
                }
                x
            })
            .collect();
        let b_images = (0..s * s)
            .map(|_| {
                let mut x: Matrix<Q> = sampling::int_matrix(rng, l, s, 2);
                for i in k..l {
                    for j in 0..s {
                        x.set(i, j, ncrat::field::q(0, 1));
                    }
                }
                x
            })
            .collect();
        a.push(BlockLinearMap::new(s, l, l, a_images).unwrap());
        b.push(BlockLinearMap::new(s, l, s, b_images).unwrap());
    }
    let r = FmRealization::new(yc(), sampling::int_matrix(rng, 2, 2, 2), sampling::int_matrix(rng, 2, l, 2), a, b).unwrap();
    r.similar(&sampling::invertible_matrix(rng, l, 2)).unwrap()
}

#[test]
fn controllable_space_examples() {
    let zero_b = vec![BlockLinearMap::<Q>::zero(2, 4, 2), BlockLinearMap::zero(2, 4, 2)];
    let a = golden_l8().a()[..].iter().map(|m| m.map_images(|x| x.block(0, 0, 4, 4))).collect::<Vec<_>>();
    assert_eq!(controllability_space(&a, &zero_b).dim(), 0);
    assert_eq!(controllability_space(golden_l8().a(), golden_l8().b()).dim(), 8);
    let v = FmRealization::synth_var(1, &yc()).unwrap();
    assert_eq!(controllability_space(v.a(), v.b()).dim(), 2);
}

#[test]
fn unobservable_space_examples() {
    let g = golden_l8();
    assert_eq!(unobservable_space(&Matrix::<Q>::zeros(2, 8), g.a()).dim(), 8);
    let no = unobservable_space(g.c(), g.a());
    assert!(no.same_as(&span(&[col(&[1, 0, 0, 0, 1, 0, 0, 0]), col(&[0, 1, 0, 0, 0, 1, 0, 0])])));
    assert_eq!(unobservable_space(golden_l6().c(), golden_l6().a()).dim(), 0);
}

#[test]
fn truncated_matrices() {
    let g = golden_l8();
    let zero_len = controllability_matrix(g.a(), g.b(), 0).unwrap();
    let mut expected = Vec::new();
    for b in g.b() {
        expected.extend(b.images().iter().cloned());
    }
    let refs: Vec<&Matrix<Q>> = expected.iter().collect();
    assert_eq!(zero_len, Matrix::hstack(8, &refs));
    // both chains have stabilised by length 3, so longer truncations add nothing
    let obs: Vec<usize> = (2..=3).map(|ell| linalg::rank(&observability_matrix(g.c(), g.a(), ell).unwrap())).collect();
    assert_eq!(obs, vec![6, 6]);
    assert_eq!(linalg::rank(&controllability_matrix(g.a(), g.b(), 2).unwrap()), 8);
}

#[test]
fn truncated_rank_decides_controllability() {
    let mut rng = sampling::rng(12);
    let mut outcomes = [0usize; 2];
    for trial in 0..20 {
        let r = layered(&mut rng, 1 + trial % 3);
        let by_rank = linalg::rank(&controllability_matrix(r.a(), r.b(), r.l() - 1).unwrap()) == r.l();
        assert_eq!(by_rank, controllability_space(r.a(), r.b()).dim() == r.l());
        outcomes[usize::from(by_rank)] += 1;
    }
    assert!(outcomes[0] > 0 && outcomes[1] > 0, "{outcomes:?}");
}

/// The chain `C₀ ⊆ C₁ ⊆ …` with `C₀` spanned by the input images and
/// `C_{t+1} = C_t + Σ A_k(E_ij) C_t`: once two consecutive terms agree, the
/// next two agree as well, and the truncated matrices span the same terms.
#[test]
fn controllability_chain_stabilises() {
    let mut rng = sampling::rng(13);
    for trial in 0..6 {
        let r = layered(&mut rng, 1 + trial % 3);
        let mut gens = Vec::new();
        for b in r.b() {
            gens.extend(b.images().iter().cloned());
        }
        let refs: Vec<&Matrix<Q>> = gens.iter().collect();
        let mut chain = vec![Subspace::span(&Matrix::hstack(r.l(), &refs))];
        for _ in 0..r.l() + 2 {
            let last = chain.last().unwrap().clone();
            let mut next = last.clone();
            for a in r.a() {
                for img in a.images() {
                    next = next.sum(&last.image(img));
                }
            }
            chain.push(next);
        }
        let stop = chain.windows(2).position(|w| w[0].same_as(&w[1])).expect("stabilises within L steps");
        assert!(stop < r.l());
        assert!(chain[stop..stop + 3].iter().all(|c| c.same_as(&chain[stop])));
        assert!(chain[chain.len() - 1].same_as(&controllability_space(r.a(), r.b())));
        for (ell, term) in chain.iter().enumerate().take(3) {
            assert!(Subspace::span(&controllability_matrix(r.a(), r.b(), ell).unwrap()).same_as(term));
        }
    }
}

/// The level-2 controllable space, computed by closing the images of the
/// blockwise-applied maps at size `2s`, is the level-1 space repeated in
/// each block.
#[test]
fn level_two_controllable_space_is_a_tensor_product() {
    let mut rng = sampling::rng(14);
    let fixtures = vec![
        synthesize(&e("x1*x2"), &yc()).unwrap(),
        FmRealization::synth_var(0, &yc()).unwrap(),
        layered(&mut rng, 2),
        layered(&mut rng, 3),
    ];
    for r in fixtures {
        assert!(r.l() <= 4);
        let (s, l, mm) = (r.s(), r.l(), 2);
        let n = s * mm;
        let units: Vec<Matrix<Q>> = (0..n * n).map(|t| Matrix::unit(n, n, t / n, t % n)).collect();
        let mut gens = Vec::new();
        for b in r.b() {
            for z in &units {
                gens.push(b.apply_blocks(z).unwrap());
            }
        }
        let refs: Vec<&Matrix<Q>> = gens.iter().collect();
        let mut space = Subspace::span(&Matrix::hstack(l * mm, &refs));
        loop {
            let mut next = space.clone();
            for a in r.a() {
                for z in &units {
                    next = next.sum(&space.image(&a.apply_blocks(z).unwrap()));
                }
            }
            if next.dim() == space.dim() {
                break;
            }
            space = next;
        }
        let level_one = controllability_space(r.a(), r.b());
        let tensor = Subspace::span(&Matrix::identity(mm).kron(level_one.basis()));
        assert!(space.same_as(&tensor));
    }
}

#[test]
fn minimality_predicates() {
    let g = golden_l8();
    assert!(is_controllable(&g) && !is_observable(&g) && !is_minimal(&g));
    let r = golden_l6();
    assert!(is_controllable(&r) && is_observable(&r) && is_minimal(&r));
    let k = FmRealization::synth_const(ncrat::field::q(5, 1), &yc()).unwrap();
    assert!(!is_observable(&k));
}

#[test]
fn kalman_reduction_of_the_worked_example() {
    let (reduced, report) = kalman_reduce(&golden_l8()).unwrap();
    assert_eq!(
        (report.original_l, report.dim_c, report.dim_no, report.dim_intersection, report.reduced_l),
        (8, 8, 2, 2, 6)
    );
    assert_eq!(report.reduced_l, report.dim_c - report.dim_intersection);
    assert!(linalg::is_invertible(&report.basis_change));
    assert_eq!(*reduced.d(), mq(2, &[&[0, 1], &[-1, 0]]));
    assert!(is_minimal(&reduced));
    let t = similarity_between(&golden_l6(), &reduced).unwrap();
    assert_eq!(golden_l6().similar(t.matrix().unwrap()).unwrap(), reduced);

    // the first reduced_L columns complete the intersection inside the controllable space
    let c_space = controllability_space(golden_l8().a(), golden_l8().b());
    let h1 = c_space.intersect(&unobservable_space(golden_l8().c(), golden_l8().a()));
    let lead = report.basis_change.select_columns(&(0..6).collect::<Vec<_>>());
    let lead_space = Subspace::span(&lead);
    assert_eq!(lead_space.dim(), 6);
    assert_eq!(lead_space.intersect(&h1).dim(), 0);
    assert!(lead_space.sum(&h1).same_as(&c_space));
}

#[test]
fn kalman_reduction_of_minimal_and_padded_inputs() {
    let r = golden_l6();
    let (same, report) = kalman_reduce(&r).unwrap();
    assert_eq!((report.dim_intersection, report.reduced_l), (0, 6));
    assert!(is_minimal(&same));
    let padded = r.add(&FmRealization::synth_const(ncrat::field::q(0, 1), &yc()).unwrap()).unwrap();
    assert_eq!(padded.l(), 7);
    assert_eq!(kalman_reduce(&padded).unwrap().0.l(), 6);
}

fn reduction_fixtures() -> Vec<FmRealization<Q>> {
    let mut rng = sampling::rng(15);
    vec![
        golden_l8(),
        synthesize(&hfix(), &yh()).unwrap(),
        synthesize(&e("x1*x2 + x2*x1 - x1*x2"), &yc()).unwrap(),
        synthesize(&hua_right(), &yh()).unwrap(),
        layered(&mut rng, 2),
    ]
}

#[test]
fn reduction_preserves_values_and_enlarges_the_domain() {
    let mut rng = sampling::rng(16);
    for r in reduction_fixtures() {
        let (reduced, _) = kalman_reduce(&r).unwrap();
        assert!(is_minimal(&reduced));
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 50 && attempts < 2000 {
            attempts += 1;
            let xs: Vec<Matrix<Q>> = sampling::int_point(&mut rng, 2, 2 * (1 + attempts % 2), 2);
            if !r.dom_contains(&xs).unwrap() {
                continue;
            }
            assert!(reduced.dom_contains(&xs).unwrap());
            assert_eq!(reduced.evaluate(&xs).unwrap(), r.evaluate(&xs).unwrap());
            checked += 1;
        }
        assert_eq!(checked, 50);
    }
}

#[test]
fn similarity_examples() {
    let r = golden_l6();
    let mut rng = sampling::rng(17);
    let t0: Matrix<Q> = sampling::invertible_matrix(&mut rng, 6, 3);
    let moved = r.similar(&t0).unwrap();
    assert_eq!(similarity_between(&r, &moved).unwrap(), Similarity::Similar(t0));
    assert_eq!(similarity_between(&r, &r).unwrap(), Similarity::Similar(Matrix::identity(6)));
    let x1 = FmRealization::synth_var(0, &yc()).unwrap();
    assert!(matches!(similarity_between(&r, &x1).unwrap(), Similarity::NotSimilar(_)));
    assert!(matches!(similarity_between(&golden_l8(), &r), Err(NcError::NotMinimal(_))));
    assert!(matches!(similarity_between(&r, &golden_l8()), Err(NcError::NotMinimal(_))));
    // equal dimensions and centre values but a different function
    let c = r.c().scale(&ncrat::field::q(2, 1));
    let tweaked = FmRealization::new(yc(), r.d().clone(), c, r.a().to_vec(), r.b().to_vec()).unwrap();
    assert!(matches!(similarity_between(&r, &tweaked).unwrap(), Similarity::NotSimilar(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn similarity_recovers_the_conjugating_matrix(seed in arb_seed()) {
        let mut rng = sampling::rng(seed);
        let r = kalman_reduce(&layered(&mut rng, 3)).unwrap().0;
        prop_assume!(r.l() > 0);
        let t0: Matrix<Q> = sampling::invertible_matrix(&mut rng, r.l(), 3);
        let moved = r.similar(&t0).unwrap();
        prop_assert_eq!(similarity_between(&r, &moved).unwrap(), Similarity::Similar(t0));
    }

    #[test]
    fn reduced_realizations_are_minimal(seed in arb_seed(), k in 1usize..=3) {
        let mut rng = sampling::rng(seed);
        let r = layered(&mut rng, k);
        let (reduced, report) = kalman_reduce(&r).unwrap();
        prop_assert!(is_minimal(&reduced));
        prop_assert_eq!(report.reduced_l, report.dim_c - report.dim_intersection);
        prop_assert!(linalg::is_invertible(&report.basis_change));
    }
}
