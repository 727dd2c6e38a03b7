//! Finite-dimensional spaces of polynomials and their quotients.
//!
//! A [`PolySpace`] stores a canonical basis: the nonzero rows of the RREF of
//! the coordinate matrix, over an index of exactly the monomials that occur
//! in the space (descending graded-lex). Two spaces are equal iff their
//! values are equal.
//!
//! The quotient `(V : x_i^k) = {p : x_i^k·p ∈ V}` is computed by ordering
//! the columns so monomials not divisible by `x_i^k` come first and
//! eliminating; rows whose pivot falls among the divisible monomials span
//! `V ∩ x_i^k·K[x]`. The quotient by a general linear form `l` first moves
//! `l` to a coordinate variable by an invertible linear substitution.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::linalg::{row_space_intersect, LinalgError, Matrix};
use crate::poly::{Monomial, MultiPoly, PolyError, PolySystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolySpaceError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("linear form is zero")]
    DegenerateLinearForm,
    #[error("expected a homogeneous linear form, got {0}")]
    NotLinearForm(String),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("exponent must be at least 1")]
    ZeroExponent,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySpace {
    ctx: FieldCtx,
    nvars: usize,
    index: Vec<Monomial>,
    basis: Matrix,
}

impl PolySpace {
    pub fn zero(ctx: FieldCtx, nvars: usize) -> Self {
        PolySpace { ctx, nvars, index: Vec::new(), basis: Matrix::zeros(ctx, 0, 0) }
    }

    /// Linear span of `gens`. Zero generators contribute nothing.
    pub fn span(ctx: FieldCtx, nvars: usize, gens: &[MultiPoly]) -> Result<Self, PolySpaceError> {
        for g in gens {
            if g.ctx() != ctx {
                return Err(PolyError::CtxMismatch(ctx, g.ctx()).into());
            }
            if g.nvars() != nvars {
                return Err(PolyError::ArityMismatch { expected: nvars, got: g.nvars() }.into());
            }
        }
        let support: BTreeSet<&Monomial> = gens.iter().flat_map(|g| g.monomials()).collect();
        let index: Vec<Monomial> = support.into_iter().rev().cloned().collect();
        let pos: HashMap<&Monomial, usize> = index.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut m = Matrix::zeros(ctx, gens.len(), index.len());
        for (i, g) in gens.iter().enumerate() {
            for (mono, c) in g.terms() {
                m.set(i, pos[mono], c);
            }
        }
        Ok(Self::canonical(ctx, nvars, index, &m))
    }

    /// Span of the polynomials whose coordinates over `index` are the rows of `m`.
    fn canonical(ctx: FieldCtx, nvars: usize, index: Vec<Monomial>, m: &Matrix) -> Self {
        let basis = m.row_basis();
        let used: Vec<usize> = (0..basis.ncols()).filter(|&j| (0..basis.nrows()).any(|i| !basis.is_zero_at(i, j))).collect();
        if used.len() == index.len() {
            return PolySpace { ctx, nvars, index, basis };
        }
        let index = used.iter().map(|&j| index[j].clone()).collect();
        PolySpace { ctx, nvars, index, basis: basis.select_cols(&used) }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Monomials occurring in the space, descending graded-lex.
    pub fn monomials(&self) -> &[Monomial] {
        &self.index
    }

    /// The RREF coordinate matrix, one row per basis element.
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    /// Common degree of all members, if the space is homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let d = self.index.first()?.degree();
        self.index.iter().all(|m| m.degree() == d).then_some(d)
    }

    /// Canonical basis polynomials. Each has leading coefficient 1 and the
    /// leading monomials are strictly decreasing.
    pub fn basis(&self) -> Vec<MultiPoly> {
        (0..self.dim()).map(|i| self.row_poly(&self.basis, i, &self.index)).collect()
    }

    pub fn basis_system(&self) -> PolySystem {
        PolySystem::new(self.ctx, self.nvars, self.basis()).expect("consistent basis")
    }

    fn row_poly(&self, m: &Matrix, i: usize, index: &[Monomial]) -> MultiPoly {
        let terms = (0..m.ncols()).filter(|&j| !m.is_zero_at(i, j)).map(|j| (index[j].clone(), m.get(i, j)));
        MultiPoly::from_terms(self.ctx, self.nvars, terms).expect("consistent row")
    }

    /// True iff `p` lies in the space.
    pub fn member(&self, p: &MultiPoly) -> bool {
        if p.ctx() != self.ctx || p.nvars() != self.nvars {
            return false;
        }
        if p.is_zero() {
            return true;
        }
        let pos: HashMap<&Monomial, usize> = self.index.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![self.ctx.zero(); self.index.len()];
        for (m, c) in p.terms() {
            match pos.get(m) {
                Some(&j) => v[j] = c.clone(),
                None => return false,
            }
        }
        // Leading entries of the RREF rows are increasing, so one pass suffices.
        for i in 0..self.dim() {
            let pc = (0..self.basis.ncols()).find(|&j| !self.basis.is_zero_at(i, j)).expect("nonzero row");
            let f = v[pc].clone();
            if f.is_zero() {
                continue;
            }
            for (j, x) in v.iter_mut().enumerate().skip(pc) {
                if !self.basis.is_zero_at(i, j) {
                    *x = &*x - &(&f * &self.basis.get(i, j));
                }
            }
        }
        v.iter().all(FieldElem::is_zero)
    }

    /// True iff `other ⊆ self`.
    pub fn contains(&self, other: &PolySpace) -> bool {
        other.basis().iter().all(|b| self.member(b))
    }

    fn compatible(&self, other: &PolySpace) -> Result<(), PolySpaceError> {
        if self.ctx != other.ctx {
            return Err(PolyError::CtxMismatch(self.ctx, other.ctx).into());
        }
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, got: other.nvars }.into());
        }
        Ok(())
    }

    /// Coordinates of both bases over the union of their supports.
    fn common_coords(&self, other: &PolySpace) -> (Vec<Monomial>, Matrix, Matrix) {
        let union: BTreeSet<&Monomial> = self.index.iter().chain(&other.index).collect();
        let index: Vec<Monomial> = union.into_iter().rev().cloned().collect();
        let pos: HashMap<&Monomial, usize> = index.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let embed = |s: &PolySpace| {
            let mut m = Matrix::zeros(self.ctx, s.dim(), index.len());
            for i in 0..s.dim() {
                for (j, mono) in s.index.iter().enumerate() {
                    if !s.basis.is_zero_at(i, j) {
                        m.set(i, pos[mono], &s.basis.get(i, j));
                    }
                }
            }
            m
        };
        let a = embed(self);
        let b = embed(other);
        (index, a, b)
    }

    pub fn intersect(&self, other: &PolySpace) -> Result<PolySpace, PolySpaceError> {
        self.compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx, self.nvars));
        }
        let (index, a, b) = self.common_coords(other);
        let cap = row_space_intersect(&a, &b)?;
        Ok(Self::canonical(self.ctx, self.nvars, index, &cap))
    }

    pub fn sum(&self, other: &PolySpace) -> Result<PolySpace, PolySpaceError> {
        self.compatible(other)?;
        let (index, a, b) = self.common_coords(other);
        Ok(Self::canonical(self.ctx, self.nvars, index, &a.vstack(&b)?))
    }

    /// Image of the space under `p ↦ p(sub_0, ..., sub_{n-1})`.
    pub fn substitute(&self, sub: &PolySystem) -> Result<PolySpace, PolySpaceError> {
        let images = self.basis_system().compose(sub)?;
        Self::span(self.ctx, sub.nvars(), images.polys())
    }

    /// `(V : x_var^k) = {p : x_var^k · p ∈ V}`.
    pub fn quotient_by_power(&self, var: usize, k: u16) -> Result<PolySpace, PolySpaceError> {
        if var >= self.nvars {
            return Err(PolySpaceError::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        if k == 0 {
            return Err(PolySpaceError::ZeroExponent);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let divisor = Monomial::var_pow(self.nvars, var, k);
        let (div, nondiv): (Vec<usize>, Vec<usize>) = (0..self.index.len()).partition(|&j| divisor.divides(&self.index[j]));
        if div.is_empty() {
            return Ok(Self::zero(self.ctx, self.nvars));
        }
        let order: Vec<usize> = nondiv.iter().chain(&div).copied().collect();
        let r = self.basis.select_cols(&order).rref();
        let cut = nondiv.len();
        let rows: Vec<usize> = (0..r.rank).filter(|&i| r.pivots[i] >= cut).collect();
        let quotient_index: Vec<Monomial> =
            div.iter().map(|&j| self.index[j].div(&divisor).expect("divisible")).collect();
        let cols: Vec<usize> = (cut..order.len()).collect();
        let m = r.matrix.select_rows(&rows).select_cols(&cols);
        // Dividing by a fixed monomial reverses no comparisons, so the
        // quotient index stays in descending order.
        Ok(Self::canonical(self.ctx, self.nvars, quotient_index, &m))
    }

    /// `(V : l) = {p : l·p ∈ V}` for a nonzero homogeneous linear form `l`.
    pub fn quotient_by_linear(&self, l: &MultiPoly) -> Result<PolySpace, PolySpaceError> {
        let coeffs = linear_coefficients(l, self.ctx, self.nvars)?;
        let lead = coeffs.iter().position(|c| !c.is_zero()).ok_or(PolySpaceError::DegenerateLinearForm)?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (forward, backward) = linear_change_of_variables(self.ctx, &coeffs, lead);
        let moved = self.substitute(&forward)?;
        let q = moved.quotient_by_power(lead, 1)?;
        q.substitute(&backward)
    }

    /// `(V : L) = ∩_i (V : x_i)` where `L` is spanned by all variables.
    pub fn quotient_by_variables(&self) -> Result<PolySpace, PolySpaceError> {
        let mut acc: Option<PolySpace> = None;
        for i in 0..self.nvars {
            let q = self.quotient_by_power(i, 1)?;
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Self::zero(self.ctx, self.nvars)))
    }

    /// JSON dump: monomial index and basis rows in canonical text.
    pub fn to_json(&self) -> Value {
        let monomials: Vec<&[u16]> = self.index.iter().map(Monomial::exponents).collect();
        let basis: Vec<Vec<String>> = self.basis.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        json!({
            "field": self.ctx.to_string(),
            "nvars": self.nvars,
            "dim": self.dim(),
            "monomials": monomials,
            "basis": basis,
        })
    }
}

/// Coefficient vector of a homogeneous linear form.
fn linear_coefficients(l: &MultiPoly, ctx: FieldCtx, nvars: usize) -> Result<Vec<FieldElem>, PolySpaceError> {
    if l.ctx() != ctx {
        return Err(PolyError::CtxMismatch(ctx, l.ctx()).into());
    }
    if l.nvars() != nvars {
        return Err(PolyError::ArityMismatch { expected: nvars, got: l.nvars() }.into());
    }
    if l.is_zero() {
        return Err(PolySpaceError::DegenerateLinearForm);
    }
    let mut coeffs = vec![ctx.zero(); nvars];
    for (m, c) in l.terms() {
        if m.degree() != 1 {
            return Err(PolySpaceError::NotLinearForm(l.to_string()));
        }
        let i = m.exponents().iter().position(|&e| e == 1).expect("degree one");
        coeffs[i] = c.clone();
    }
    Ok(coeffs)
}

/// Substitutions moving `l = Σ c_j x_j` to the variable `x_lead` and back.
///
/// `forward` maps `x_lead ↦ (x_lead − Σ_{j≠lead} c_j x_j) / c_lead` and fixes
/// the other variables, so `l(forward) = x_lead`; `backward` maps
/// `x_lead ↦ l` and is its inverse.
fn linear_change_of_variables(ctx: FieldCtx, coeffs: &[FieldElem], lead: usize) -> (PolySystem, PolySystem) {
    let n = coeffs.len();
    let inv = coeffs[lead].inv().expect("nonzero lead");
    let mut fwd = Vec::with_capacity(n);
    let mut back = Vec::with_capacity(n);
    for i in 0..n {
        if i != lead {
            fwd.push(MultiPoly::var(ctx, n, i));
            back.push(MultiPoly::var(ctx, n, i));
            continue;
        }
        let terms = (0..n).filter(|&j| !coeffs[j].is_zero()).map(|j| {
            let c = if j == lead { inv.clone() } else { -(&coeffs[j] * &inv) };
            (Monomial::var(n, j), c)
        });
        fwd.push(MultiPoly::from_terms(ctx, n, terms).expect("valid terms"));
        let l_terms = (0..n).map(|j| (Monomial::var(n, j), coeffs[j].clone()));
        back.push(MultiPoly::from_terms(ctx, n, l_terms).expect("valid terms"));
    }
    let sys = |v| PolySystem::new(ctx, n, v).expect("consistent");
    (sys(fwd), sys(back))
}

/// Span of all first partial derivatives `∂f_i/∂x_j`.
pub fn build_vtilde(f: &PolySystem) -> PolySpace {
    PolySpace::span(f.ctx(), f.nvars(), &f.partials()).expect("consistent system")
}

/// Span of `m·∂f_i/∂x_j` over all monomials `m` of degree `d`.
pub fn build_vtilde_d(f: &PolySystem, d: u32) -> PolySpace {
    let partials = f.partials();
    let mut gens = Vec::new();
    for m in Monomial::all_of_degree(f.nvars(), d) {
        gens.extend(partials.iter().map(|p| p.mul_monomial(&m)));
    }
    PolySpace::span(f.ctx(), f.nvars(), &gens).expect("consistent system")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn mono(k: FieldCtx, e: &[u16]) -> MultiPoly {
        MultiPoly::from_int_terms(k, e.len(), &[(1, e)])
    }

    fn random_form<R: rand::Rng>(k: FieldCtx, n: usize, d: u32, rng: &mut R) -> MultiPoly {
        let terms = Monomial::all_of_degree(n, d).into_iter().map(|m| (m, k.sample_uniform(rng)));
        MultiPoly::from_terms(k, n, terms).unwrap()
    }

    #[test]
    fn span_dimensions() {
        let k = q();
        let xy = mono(k, &[1, 1, 0]);
        let yy = mono(k, &[0, 2, 0]);
        let yz = mono(k, &[0, 1, 1]);
        assert_eq!(PolySpace::span(k, 3, &[xy.clone(), yy, yz]).unwrap().dim(), 3);
        let two = xy.scale(&k.from_i64(2));
        assert_eq!(PolySpace::span(k, 3, &[xy, two, MultiPoly::zero(k, 3)]).unwrap().dim(), 1);
        assert_eq!(PolySpace::span(k, 3, &[]).unwrap(), PolySpace::zero(k, 3));
    }

    #[test]
    fn canonical_under_shuffle_and_scaling() {
        let k = FieldCtx::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gens: Vec<MultiPoly> = (0..5).map(|_| random_form(k, 4, 2, &mut rng)).collect();
        let a = PolySpace::span(k, 4, &gens).unwrap();
        let mut shuffled: Vec<MultiPoly> = gens.iter().rev().map(|g| g.scale(&k.from_i64(3))).collect();
        shuffled.push(&gens[0] + &gens[1]);
        assert_eq!(a, PolySpace::span(k, 4, &shuffled).unwrap());
    }

    #[test]
    fn membership() {
        let k = q();
        let xy = mono(k, &[1, 1]);
        let yy = mono(k, &[0, 2]);
        let v = PolySpace::span(k, 2, &[xy.clone(), yy.clone()]).unwrap();
        assert!(v.member(&MultiPoly::zero(k, 2)));
        assert!(v.member(&(&yy - &xy.scale(&k.from_i64(3)))));
        assert!(!v.member(&mono(k, &[2, 0])));
        assert!(!v.member(&(&yy + &MultiPoly::one(k, 2))));
    }

    #[test]
    fn quotient_by_cube_of_variable() {
        let k = q();
        let quads = Monomial::all_of_degree(3, 2);
        let x1cubed = Monomial::var_pow(3, 0, 3);
        let gens: Vec<MultiPoly> = quads.iter().map(|m| MultiPoly::term(k, m.mul(&x1cubed), k.one())).collect();
        let v = PolySpace::span(k, 3, &gens).unwrap();
        let all: Vec<MultiPoly> = quads.iter().map(|m| MultiPoly::term(k, m.clone(), k.one())).collect();
        assert_eq!(v.quotient_by_power(0, 3).unwrap(), PolySpace::span(k, 3, &all).unwrap());
        assert!(PolySpace::zero(k, 3).quotient_by_power(1, 2).unwrap().is_zero());
        assert!(v.quotient_by_power(3, 1).is_err());
    }

    #[test]
    fn linear_quotient_contains_planted_space() {
        let k = FieldCtx::prime(65537).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 4;
        let w: Vec<MultiPoly> = (0..3).map(|_| random_form(k, n, 2, &mut rng)).collect();
        let x0 = MultiPoly::var(k, n, 0);
        let v = PolySpace::span(k, n, &w.iter().map(|p| &x0 * p).collect::<Vec<_>>()).unwrap();
        let quo = v.quotient_by_power(0, 1).unwrap();
        assert!(w.iter().all(|p| quo.member(p)));
        // the same through a generic linear form
        let l = random_form(k, n, 1, &mut rng);
        let v = PolySpace::span(k, n, &w.iter().map(|p| &l * p).collect::<Vec<_>>()).unwrap();
        let quo = v.quotient_by_linear(&l).unwrap();
        assert_eq!(quo, PolySpace::span(k, n, &w).unwrap());
    }

    #[test]
    fn linear_form_validation() {
        let k = q();
        let v = PolySpace::span(k, 2, &[mono(k, &[1, 1])]).unwrap();
        assert_eq!(v.quotient_by_linear(&MultiPoly::zero(k, 2)), Err(PolySpaceError::DegenerateLinearForm));
        assert!(matches!(v.quotient_by_linear(&mono(k, &[2, 0])), Err(PolySpaceError::NotLinearForm(_))));
        let affine = &MultiPoly::var(k, 2, 0) + &MultiPoly::one(k, 2);
        assert!(matches!(v.quotient_by_linear(&affine), Err(PolySpaceError::NotLinearForm(_))));
    }

    #[test]
    fn intersection_and_sum() {
        let k = q();
        let a = PolySpace::span(k, 2, &[mono(k, &[2, 0]), mono(k, &[1, 1])]).unwrap();
        let b = PolySpace::span(k, 2, &[mono(k, &[1, 1]), mono(k, &[0, 2])]).unwrap();
        let cap = a.intersect(&b).unwrap();
        assert_eq!(cap, PolySpace::span(k, 2, &[mono(k, &[1, 1])]).unwrap());
        assert_eq!(a.sum(&b).unwrap().dim(), 3);
        assert!(a.contains(&cap) && b.contains(&cap));
    }

    #[test]
    fn vtilde_d_collapses_and_grows() {
        let k = FieldCtx::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = PolySystem::new(k, 3, (0..2).map(|_| random_form(k, 3, 4, &mut rng)).collect()).unwrap();
        assert_eq!(build_vtilde_d(&f, 0), build_vtilde(&f));
        assert!(build_vtilde_d(&f, 1).dim() >= build_vtilde(&f).dim());
        let constant = PolySystem::new(k, 3, vec![MultiPoly::one(k, 3)]).unwrap();
        assert!(build_vtilde(&constant).is_zero());
    }

    #[test]
    fn json_dump_shape() {
        let k = q();
        let v = PolySpace::span(k, 2, &[mono(k, &[1, 1]), mono(k, &[0, 2]).scale(&k.from_fraction(1, 2).unwrap())]).unwrap();
        let j = v.to_json();
        assert_eq!(j["dim"], 2);
        assert_eq!(j["monomials"], json!([[1, 1], [0, 2]]));
        assert_eq!(j["basis"], json!([["1", "0"], ["0", "1"]]));
    }
}
