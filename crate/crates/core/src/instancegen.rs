//! Seeded generators for decomposable systems and 2R-style key pairs.
//!
//! A random polynomial of degree `d` draws i.i.d. uniform coefficients for
//! every monomial up to degree `d` (exactly `d` when homogeneous), zero
//! draws included. All generators are pure functions of their spec and
//! seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldCtx, FieldElem, DEFAULT_RATIONAL_BOUND};
use crate::linalg::Matrix;
use crate::poly::codec::{system_from_str, system_to_string, ParseError};
use crate::poly::{Monomial, MultiPoly, PolySystem};
use crate::polyspace::PolySpace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("rank {k} must satisfy 1 <= k < n = {n}")]
    InvalidRank { k: usize, n: usize },
    #[error("2R keys need a prime field")]
    NotPrimeField,
    #[error("right factor has {got} variables, spec has n = {n}")]
    ArityMismatch { got: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub field: FieldCtx,
    pub n: usize,
    pub u: usize,
    pub homogeneous: bool,
    pub d_g: u32,
    pub d_h: u32,
    pub seed: u64,
    /// Integer range for rational coefficients; ignored over GF(p).
    pub coeff_bound: u64,
}

impl GenSpec {
    /// Quadratic `g` and `h`, `u = n`, affine, seed 0.
    pub fn new(field: FieldCtx, n: usize) -> Self {
        GenSpec { field, n, u: n, homogeneous: false, d_g: 2, d_h: 2, seed: 0, coeff_bound: DEFAULT_RATIONAL_BOUND }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn homogeneous(mut self, yes: bool) -> Self {
        self.homogeneous = yes;
        self
    }

    pub fn outputs(mut self, u: usize) -> Self {
        self.u = u;
        self
    }

    pub fn degrees(mut self, d_g: u32, d_h: u32) -> Self {
        self.d_g = d_g;
        self.d_h = d_h;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 || self.u == 0 {
            return Err(GenError::InvalidSpec(format!("need n >= 1 and u >= 1, got n = {}, u = {}", self.n, self.u)));
        }
        if self.d_g == 0 || self.d_h == 0 {
            return Err(GenError::InvalidSpec("degrees must be positive".into()));
        }
        if self.d_g * self.d_h > 4 {
            return Err(GenError::InvalidSpec(format!("d_g * d_h = {} exceeds 4", self.d_g * self.d_h)));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A generated instance with its planted factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub f: PolySystem,
    pub g: PolySystem,
    pub h: PolySystem,
}

/// Dense random polynomial of degree at most `d` (exactly `d` per term when
/// `homogeneous`).
pub fn random_poly<R: Rng + ?Sized>(ctx: FieldCtx, nvars: usize, d: u32, homogeneous: bool, bound: u64, rng: &mut R) -> MultiPoly {
    let monos = if homogeneous { Monomial::all_of_degree(nvars, d) } else { Monomial::all_up_to_degree(nvars, d) };
    let terms: Vec<(Monomial, FieldElem)> = monos.into_iter().map(|m| (m, ctx.sample_bounded(rng, bound))).collect();
    MultiPoly::from_terms(ctx, nvars, terms).expect("consistent terms")
}

pub fn random_system<R: Rng + ?Sized>(
    ctx: FieldCtx,
    nvars: usize,
    count: usize,
    d: u32,
    homogeneous: bool,
    bound: u64,
    rng: &mut R,
) -> PolySystem {
    let polys = (0..count).map(|_| random_poly(ctx, nvars, d, homogeneous, bound, rng)).collect();
    PolySystem::new(ctx, nvars, polys).expect("consistent system")
}

/// `f = g ∘ h` for random `g` (`u` components) and `h` (`n` components).
pub fn gen_decomposable(spec: &GenSpec) -> Result<Instance, GenError> {
    spec.validate()?;
    let mut rng = spec.rng();
    let h = random_system(spec.field, spec.n, spec.n, spec.d_h, spec.homogeneous, spec.coeff_bound, &mut rng);
    let g = random_system(spec.field, spec.n, spec.u, spec.d_g, spec.homogeneous, spec.coeff_bound, &mut rng);
    let f = g.compose(&h).expect("arities match");
    Ok(Instance { f, g, h })
}

/// Like [`gen_decomposable`] but with a fixed right factor `h`.
pub fn gen_with_right_factor(spec: &GenSpec, h: &PolySystem) -> Result<Instance, GenError> {
    spec.validate()?;
    if h.nvars() != spec.n || h.ctx() != spec.field {
        return Err(GenError::ArityMismatch { got: h.nvars(), n: spec.n });
    }
    let mut rng = spec.rng();
    let g = random_system(spec.field, h.len(), spec.u, spec.d_g, spec.homogeneous, spec.coeff_bound, &mut rng);
    let f = g.compose(h).expect("arities match");
    Ok(Instance { f, g, h: h.clone() })
}

/// Instance whose right factor spans exactly `k < n` dimensions: `k` random
/// components followed by random combinations of them.
pub fn gen_rank_deficient(spec: &GenSpec, k: usize) -> Result<Instance, GenError> {
    spec.validate()?;
    if k == 0 || k >= spec.n {
        return Err(GenError::InvalidRank { k, n: spec.n });
    }
    let ctx = spec.field;
    let mut rng = spec.rng();
    let h = loop {
        let base = random_system(ctx, spec.n, k, spec.d_h, spec.homogeneous, spec.coeff_bound, &mut rng);
        if PolySpace::span(ctx, spec.n, base.polys()).expect("consistent").dim() != k {
            continue;
        }
        let mut polys = base.polys().to_vec();
        for _ in k..spec.n {
            let mut comb = MultiPoly::zero(ctx, spec.n);
            for b in base.polys() {
                comb = &comb + &b.scale(&ctx.sample_bounded(&mut rng, spec.coeff_bound));
            }
            polys.push(comb);
        }
        break PolySystem::new(ctx, spec.n, polys).expect("consistent");
    };
    let g = random_system(ctx, spec.n, spec.u, spec.d_g, spec.homogeneous, spec.coeff_bound, &mut rng);
    let f = g.compose(&h).expect("arities match");
    Ok(Instance { f, g, h })
}

/// Private half of a 2R key: invertible linear maps `r`, `s`, `t` and
/// quadratic maps `phi`, `psi`.
#[derive(Debug, Clone)]
pub struct TwoRPrivate {
    pub r: PolySystem,
    pub s: PolySystem,
    pub t: PolySystem,
    pub phi: PolySystem,
    pub psi: PolySystem,
}

#[derive(Debug, Clone)]
pub struct TwoRKeyPair {
    pub private: TwoRPrivate,
    /// `t ∘ psi ∘ s ∘ phi ∘ r`, degree four.
    pub public: PolySystem,
}

impl TwoRKeyPair {
    /// The inner half `s ∘ phi ∘ r`, a right factor of the public map.
    pub fn inner(&self) -> PolySystem {
        let p = &self.private;
        p.s.compose(&p.phi.compose(&p.r).expect("arity")).expect("arity")
    }

    /// The outer half `t ∘ psi`.
    pub fn outer(&self) -> PolySystem {
        self.private.t.compose(&self.private.psi).expect("arity")
    }

    /// Applies the five private maps in turn.
    pub fn evaluate_private(&self, x: &[FieldElem]) -> Vec<FieldElem> {
        let p = &self.private;
        [&p.r, &p.phi, &p.s, &p.psi, &p.t]
            .iter()
            .fold(x.to_vec(), |v, map| map.evaluate(&v).expect("arity"))
    }
}

fn random_invertible_linear(ctx: FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> PolySystem {
    loop {
        let rows: Vec<Vec<FieldElem>> = (0..n).map(|_| (0..n).map(|_| ctx.sample_uniform(rng)).collect()).collect();
        let m = Matrix::from_rows(ctx, n, &rows).expect("square");
        if m.rank() < n {
            continue;
        }
        let polys = rows
            .iter()
            .map(|row| {
                let terms = row.iter().enumerate().map(|(j, c)| (Monomial::var(n, j), c.clone()));
                MultiPoly::from_terms(ctx, n, terms).expect("valid")
            })
            .collect();
        return PolySystem::new(ctx, n, polys).expect("consistent");
    }
}

/// Random 2R key pair over GF(p). The S-box structure of deployed schemes
/// is not modeled: `phi` and `psi` are plain random quadratic maps.
pub fn gen_2r_keypair(ctx: FieldCtx, n: usize, seed: u64) -> Result<TwoRKeyPair, GenError> {
    if !ctx.is_prime_field() {
        return Err(GenError::NotPrimeField);
    }
    if n == 0 {
        return Err(GenError::InvalidSpec("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = random_invertible_linear(ctx, n, &mut rng);
    let s = random_invertible_linear(ctx, n, &mut rng);
    let t = random_invertible_linear(ctx, n, &mut rng);
    let phi = random_system(ctx, n, n, 2, false, 0, &mut rng);
    let psi = random_system(ctx, n, n, 2, false, 0, &mut rng);
    let private = TwoRPrivate { r, s, t, phi, psi };
    let inner = private.s.compose(&private.phi.compose(&private.r).expect("arity")).expect("arity");
    let public = private.t.compose(&private.psi.compose(&inner).expect("arity")).expect("arity");
    Ok(TwoRKeyPair { private, public })
}

/// Canonical JSON bytes of a system.
pub fn serialize(sys: &PolySystem) -> Vec<u8> {
    system_to_string(sys).into_bytes()
}

pub fn parse(bytes: &[u8]) -> Result<PolySystem, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError {
        position: format!("byte {}", e.valid_up_to()),
        message: "input is not UTF-8".into(),
    })?;
    system_from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GenSpec::new(gf(7), 2).seed(42);
        assert_eq!(gen_decomposable(&spec).unwrap(), gen_decomposable(&spec).unwrap());
        assert_ne!(gen_decomposable(&spec).unwrap(), gen_decomposable(&spec.seed(43)).unwrap());
    }

    #[test]
    fn homogeneous_degrees() {
        let inst = gen_decomposable(&GenSpec::new(gf(101), 3).homogeneous(true).seed(1)).unwrap();
        assert!(inst.h.is_homogeneous_of(2));
        assert!(inst.g.is_homogeneous_of(2));
        assert!(inst.f.is_homogeneous_of(4));
    }

    #[test]
    fn degree_product_bound() {
        assert!(GenSpec::new(gf(7), 2).degrees(3, 2).validate().is_err());
        assert!(GenSpec::new(gf(7), 2).degrees(4, 1).validate().is_ok());
        for seed in 0..10 {
            let inst = gen_decomposable(&GenSpec::new(gf(7), 2).seed(seed)).unwrap();
            assert!(inst.f.degree() <= 4);
        }
    }

    #[test]
    fn rank_deficient_has_exact_rank() {
        let k = gf(65537);
        for rank in [1, 2, 3] {
            let inst = gen_rank_deficient(&GenSpec::new(k, 5).seed(rank as u64), rank).unwrap();
            assert_eq!(PolySpace::span(k, 5, inst.h.polys()).unwrap().dim(), rank);
            assert_eq!(inst.g.compose(&inst.h).unwrap(), inst.f);
        }
        assert_eq!(gen_rank_deficient(&GenSpec::new(k, 3), 3).unwrap_err(), GenError::InvalidRank { k: 3, n: 3 });
        assert!(gen_rank_deficient(&GenSpec::new(k, 3), 0).is_err());
    }

    #[test]
    fn fixed_right_factor_shape() {
        let k = gf(101);
        let sum_sq = MultiPoly::from_int_terms(k, 3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (1, &[0, 0, 2])]);
        let x2sq = MultiPoly::from_int_terms(k, 3, &[(1, &[0, 2, 0])]);
        let h = PolySystem::new(k, 3, vec![sum_sq, x2sq.clone(), x2sq]).unwrap();
        let inst = gen_with_right_factor(&GenSpec::new(k, 3).seed(3), &h).unwrap();
        assert_eq!(inst.h, h);
        assert_eq!(PolySpace::span(k, 3, h.polys()).unwrap().dim(), 2);
    }

    #[test]
    fn two_r_public_key_shape() {
        let k = gf(65537);
        let key = gen_2r_keypair(k, 4, 9).unwrap();
        assert_eq!(key.public.degree(), 4);
        assert!(key.public.polys().iter().all(|p| p.degree() <= 4));
        assert_eq!(key.outer().compose(&key.inner()).unwrap(), key.public);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            let x: Vec<FieldElem> = (0..4).map(|_| k.sample_uniform(&mut rng)).collect();
            assert_eq!(key.public.evaluate(&x).unwrap(), key.evaluate_private(&x));
        }
        assert_eq!(gen_2r_keypair(FieldCtx::Rationals, 3, 0).unwrap_err(), GenError::NotPrimeField);
    }

    #[test]
    fn serialize_is_deterministic_and_parse_rejects_garbage() {
        let inst = gen_decomposable(&GenSpec::new(gf(7), 2).seed(5)).unwrap();
        assert_eq!(serialize(&inst.f), serialize(&inst.f.clone()));
        assert!(parse(b"{bad").is_err());
        assert!(parse(&[0xff, 0xfe]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]
            #[test]
            fn round_trip(seed in any::<u64>(), n in 1usize..4, rational in any::<bool>()) {
                let ctx = if rational { FieldCtx::Rationals } else { gf(101) };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let s = random_system(ctx, n, n + 1, 3, false, 1000, &mut rng);
                prop_assert_eq!(parse(&serialize(&s)).unwrap(), s);
            }
        }
    }
}
