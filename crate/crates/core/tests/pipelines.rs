//! End-to-end behaviour of the decomposition pipelines against the oracles.

use polydecomp::decomposer::{
    decompose_homogeneous, decompose_underdetermined, factor_space_mod_constants, fdpmp4, solve_left_factor, DecompError,
    DecomposeOptions, Stage,
};
use polydecomp::field::FieldCtx;
use polydecomp::instancegen::{gen_decomposable, gen_rank_deficient, random_system, GenSpec};
use polydecomp::oracles::{brute_vfd, conjecture_y_holds, exhaustive_decompose, power_quotient_trial};
use polydecomp::poly::{MultiPoly, PolySystem};
use polydecomp::polyspace::{build_vtilde_d, PolySpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn big() -> FieldCtx {
    FieldCtx::prime(65537).unwrap()
}

fn sys(k: FieldCtx, n: usize, polys: &[&[(i64, &[u16])]]) -> PolySystem {
    PolySystem::new(k, n, polys.iter().map(|t| MultiPoly::from_int_terms(k, n, t)).collect()).unwrap()
}

#[test]
fn squares_example_never_returns_unverified() {
    let q = FieldCtx::Rationals;
    let f = sys(q, 2, &[&[(1, &[2, 2])], &[(1, &[4, 0]), (1, &[0, 4])]]);
    match decompose_homogeneous(&f, &DecomposeOptions::default()) {
        Ok(res) => assert!(res.verified && res.g.compose(&res.h).unwrap() == f),
        Err(e) => assert!(matches!(e, DecompError::Failure { .. })),
    }
}

#[test]
fn rank_deficient_forms_use_padding() {
    let k = big();
    for (seed, rank) in [(1, 2), (2, 3), (3, 4)] {
        let inst = gen_rank_deficient(&GenSpec::new(k, 5).homogeneous(true).seed(seed), rank).unwrap();
        let res = decompose_homogeneous(&inst.f, &DecomposeOptions::with_seed(seed)).unwrap();
        assert!(res.verified && res.padding_used);
        assert_eq!(res.factor_space_dim, rank);
        assert_eq!(res.right_factor_space, PolySpace::span(k, 5, inst.h.polys()).unwrap());
        assert!(res.h.polys()[rank..].iter().all(|p| p == &res.h.polys()[0]));
    }
}

#[test]
fn underdetermined_round_trip() {
    let k = big();
    let mut verified = 0;
    for seed in 0..5 {
        let inst = gen_decomposable(&GenSpec::new(k, 6).outputs(5).homogeneous(true).seed(seed)).unwrap();
        match decompose_underdetermined(&inst.f, 1, &DecomposeOptions::with_seed(seed)) {
            Ok(res) => {
                assert_eq!(res.g.compose(&res.h).unwrap(), inst.f);
                verified += 1;
            }
            Err(e) => assert!(matches!(e, DecompError::Failure { .. }), "{e}"),
        }
    }
    assert!(verified >= 4, "verified {verified} of 5");
}

#[test]
fn underdetermined_oversized_quotient_fails_at_quotient() {
    // With d = 2 the multiples of the partials fill every quintic, so the
    // quotient by x^3 is all quadratic forms: too big for n = 3.
    let k = big();
    let inst = gen_decomposable(&GenSpec::new(k, 3).outputs(2).homogeneous(true).seed(4)).unwrap();
    assert_eq!(build_vtilde_d(&inst.f, 2).dim(), 21);
    let err = decompose_underdetermined(&inst.f, 2, &DecomposeOptions::default()).unwrap_err();
    assert_eq!(err.stage(), Stage::Quotient);
}

#[test]
fn underdetermined_collapses_to_homogeneous() {
    let k = big();
    let inst = gen_decomposable(&GenSpec::new(k, 5).homogeneous(true).seed(8)).unwrap();
    let a = decompose_underdetermined(&inst.f, 0, &DecomposeOptions::with_seed(8)).unwrap();
    let b = decompose_homogeneous(&inst.f, &DecomposeOptions::with_seed(8)).unwrap();
    assert_eq!(a.g, b.g);
    assert_eq!(a.h, b.h);
}

#[test]
fn vtilde_d_inside_vfd() {
    let k = big();
    for seed in 0..5 {
        let inst = gen_decomposable(&GenSpec::new(k, 4).outputs(3).homogeneous(true).seed(seed)).unwrap();
        assert!(brute_vfd(&inst.h, 1).contains(&build_vtilde_d(&inst.f, 1)));
    }
}

#[test]
fn three_var_vfd_dimension() {
    let q = FieldCtx::Rationals;
    let h = sys(q, 3, &[&[(1, &[1, 1, 0])], &[(1, &[0, 2, 0])], &[(1, &[0, 1, 1])]]);
    assert_eq!(brute_vfd(&h, 0).dim(), 6);
    // Golden value recorded from this oracle.
    assert_eq!(brute_vfd(&h, 1).dim(), 10);
}

#[test]
fn random_quartics_have_no_left_factor() {
    let k = big();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let f = random_system(k, 3, 3, 4, true, 0, &mut rng);
        let h = random_system(k, 3, 3, 2, true, 0, &mut rng);
        assert_eq!(solve_left_factor(&f, &h, 2).unwrap_err(), DecompError::NoSolution);
        assert!(decompose_homogeneous(&f, &DecomposeOptions::default()).is_err());
    }
}

#[test]
fn conjecture_y_implies_homogeneous_success() {
    let k = big();
    for seed in 0..20 {
        let inst = gen_decomposable(&GenSpec::new(k, 5).homogeneous(true).seed(seed)).unwrap();
        if conjecture_y_holds(&inst.h) {
            let res = decompose_homogeneous(&inst.f, &DecomposeOptions::with_seed(seed)).unwrap();
            assert!(res.verified);
        }
    }
}

#[test]
fn no_false_positives_at_toy_scale() {
    let k = FieldCtx::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..5 {
        let f = loop {
            let f = random_system(k, 2, 2, 4, false, 0, &mut rng);
            if f.degree() == 4 {
                break f;
            }
        };
        let hits = exhaustive_decompose(&f, 10_000).unwrap();
        let spaces: Vec<PolySpace> = hits.iter().map(|(_, h)| factor_space_mod_constants(h)).collect();
        if let Ok(res) = fdpmp4(&f, &DecomposeOptions::with_seed(seed)) {
            assert_eq!(res.g.compose(&res.h).unwrap(), f);
            assert!(spaces.contains(&factor_space_mod_constants(&res.h)));
        }
    }
}

#[test]
fn large_multiplier_degree_breaks_the_quotient() {
    // Outside the hypotheses the multiples fill all quartics and the
    // quotient becomes all quadratic forms.
    let k = big();
    for seed in 0..3 {
        assert!(!power_quotient_trial(3, 2, 2, k, seed, true).unwrap());
    }
}
