//! Algebraic laws checked on random inputs against independent oracles.

use polydecomp::decomposer::{decompose_homogeneous, factor_space_mod_constants, fdpmp4, DecomposeOptions};
use polydecomp::field::{FieldCtx, FieldElem};
use polydecomp::instancegen::{gen_decomposable, random_poly, random_system, GenSpec};
use polydecomp::linalg::Matrix;
use polydecomp::oracles::brute_vf;
use polydecomp::poly::{Monomial, MultiPoly, PolySystem};
use polydecomp::polyspace::{build_vtilde, PolySpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gf101() -> FieldCtx {
    FieldCtx::prime(101).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point(ctx: FieldCtx, n: usize, r: &mut ChaCha8Rng) -> Vec<FieldElem> {
    (0..n).map(|_| ctx.sample_uniform(r)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_rule(seed in any::<u64>(), n in 1usize..4, j in 0usize..4) {
        let k = gf101();
        let j = j % n;
        let mut r = rng(seed);
        let p = random_poly(k, n, 3, false, 0, &mut r);
        let q = random_poly(k, n, 2, false, 0, &mut r);
        let lhs = (&p * &q).derivative(j).unwrap();
        let rhs = &(&p.derivative(j).unwrap() * &q) + &(&p * &q.derivative(j).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_rule(seed in any::<u64>(), n in 1usize..4) {
        let k = gf101();
        let mut r = rng(seed);
        let g = random_system(k, n, n, 2, false, 0, &mut r);
        let h = random_system(k, n, n, 2, false, 0, &mut r);
        let f = g.compose(&h).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut rhs = MultiPoly::zero(k, n);
                for kk in 0..n {
                    let outer = PolySystem::new(k, n, vec![g.get(i).derivative(kk).unwrap()]).unwrap().compose(&h).unwrap();
                    rhs = &rhs + &(outer.get(0) * &h.get(kk).derivative(j).unwrap());
                }
                prop_assert_eq!(f.get(i).derivative(j).unwrap(), rhs);
            }
        }
    }

    #[test]
    fn homogenize_round_trip(seed in any::<u64>(), n in 1usize..5, d in 1u32..5) {
        let k = gf101();
        let mut r = rng(seed);
        let f = random_system(k, n, 3, d, false, 0, &mut r);
        let df = f.degree().max(0) as u32;
        let back = f.homogenize(df).unwrap().dehomogenize().unwrap().skip(1);
        prop_assert_eq!(back, f);
    }

    #[test]
    fn homogenization_law(seed in any::<u64>(), n in 1usize..4, dg in 1u32..3, dh in 1u32..3) {
        let k = gf101();
        let mut r = rng(seed);
        let g = random_system(k, n, n, dg, false, 0, &mut r);
        let h = random_system(k, n, n, dh, false, 0, &mut r);
        let f = g.compose(&h).unwrap();
        prop_assume!(g.degree() > 0 && h.degree() > 0 && f.degree() >= 0);
        let (dg, dh, df) = (g.degree() as u32, h.degree() as u32, f.degree() as u32);
        let lhs = g.homogenize(dg).unwrap().compose(&h.homogenize(dh).unwrap()).unwrap();
        let shift = Monomial::var_pow(n + 1, 0, (dg * dh - df) as u16);
        let fstar = f.homogenize(df).unwrap();
        for (a, b) in lhs.polys().iter().zip(fstar.polys()) {
            prop_assert_eq!(a, &b.mul_monomial(&shift));
        }
    }

    #[test]
    fn vtilde_inside_vf(seed in any::<u64>(), n in 2usize..5) {
        let k = gf101();
        let inst = gen_decomposable(&GenSpec::new(k, n).homogeneous(true).seed(seed)).unwrap();
        let vf = brute_vf(&inst.h);
        for b in build_vtilde(&inst.f).basis() {
            prop_assert!(vf.member(&b));
        }
    }

    #[test]
    fn quotient_by_linear_matches_kernel_oracle(seed in any::<u64>(), n in 2usize..4, extra in 0usize..4) {
        let k = gf101();
        let mut r = rng(seed);
        let l = random_poly(k, n, 1, true, 0, &mut r);
        prop_assume!(!l.is_zero());
        let mut gens: Vec<MultiPoly> = (0..2).map(|_| &l * &random_poly(k, n, 1, true, 0, &mut r)).collect();
        gens.extend((0..extra).map(|_| random_poly(k, n, 2, true, 0, &mut r)));
        let v = PolySpace::span(k, n, &gens).unwrap();
        let got = v.quotient_by_linear(&l).unwrap();
        for b in got.basis() {
            prop_assert!(v.member(&(&l * &b)));
        }
        prop_assert_eq!(got, kernel_quotient(&v, &l));
    }
}

/// `(V : l)` for a space of quadratic forms, from the kernel of the
/// vectors `l·m` (m linear) stacked with a basis of `V`.
fn kernel_quotient(v: &PolySpace, l: &MultiPoly) -> PolySpace {
    let (k, n) = (v.ctx(), v.nvars());
    let lin = Monomial::all_of_degree(n, 1);
    let quad = Monomial::all_of_degree(n, 2);
    let coords = |p: &MultiPoly| -> Vec<FieldElem> { quad.iter().map(|m| p.coeff(m)).collect() };
    let mut cols: Vec<Vec<FieldElem>> = lin.iter().map(|m| coords(&l.mul_monomial(m))).collect();
    cols.extend(v.basis().iter().map(coords));
    let a = Matrix::from_rows(k, quad.len(), &cols).unwrap().transpose();
    let ker = a.kernel();
    let gens: Vec<MultiPoly> = (0..ker.nrows())
        .map(|i| {
            let terms = lin.iter().enumerate().map(|(j, m)| (m.clone(), ker.get(i, j)));
            MultiPoly::from_terms(k, n, terms).unwrap()
        })
        .collect();
    PolySpace::span(k, n, &gens).unwrap()
}

#[test]
fn compose_matches_nested_evaluation() {
    let k = gf101();
    let mut r = rng(4);
    let g = random_system(k, 4, 4, 2, false, 0, &mut r);
    let h = random_system(k, 4, 4, 2, false, 0, &mut r);
    let f = g.compose(&h).unwrap();
    for _ in 0..20 {
        let x = point(k, 4, &mut r);
        assert_eq!(f.evaluate(&x).unwrap(), g.evaluate(&h.evaluate(&x).unwrap()).unwrap());
    }
}

#[test]
fn homogenize_round_trip_fifty_systems() {
    let k = gf101();
    let mut r = rng(50);
    for _ in 0..50 {
        let f = random_system(k, 3, 3, 4, false, 0, &mut r);
        let df = f.degree() as u32;
        assert_eq!(f.homogenize(df).unwrap().dehomogenize().unwrap().skip(1), f);
    }
}

#[test]
fn factor_space_is_invariant_under_equivalence() {
    // g∘h = (g∘P)∘(P⁻¹∘h): the recovered space depends only on span(h).
    let k = FieldCtx::prime(65537).unwrap();
    for seed in 0..5 {
        let inst = gen_decomposable(&GenSpec::new(k, 5).seed(seed)).unwrap();
        let res = fdpmp4(&inst.f, &DecomposeOptions::with_seed(seed)).unwrap();
        assert!(res.verified);
        assert_eq!(res.right_factor_space, factor_space_mod_constants(&inst.h));
        let again = fdpmp4(&inst.f, &DecomposeOptions::with_seed(seed + 100)).unwrap();
        assert_eq!(again.right_factor_space, res.right_factor_space);
    }
}

#[test]
fn pipelines_agree_on_forms() {
    let k = FieldCtx::prime(65537).unwrap();
    for seed in 0..5 {
        let inst = gen_decomposable(&GenSpec::new(k, 5).homogeneous(true).seed(seed)).unwrap();
        let a = decompose_homogeneous(&inst.f, &DecomposeOptions::with_seed(seed)).unwrap();
        let b = fdpmp4(&inst.f, &DecomposeOptions::with_seed(seed)).unwrap();
        assert_eq!(a.right_factor_space, b.right_factor_space);
    }
}
