use std::collections::HashMap;
use std::fmt;

use crate::field::{FieldCtx, FieldElem};

use super::{Monomial, MultiPoly, PolyError};

/// An ordered tuple of polynomials over one field and one variable set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySystem {
    ctx: FieldCtx,
    nvars: usize,
    polys: Vec<MultiPoly>,
}

impl PolySystem {
    pub fn new(ctx: FieldCtx, nvars: usize, polys: Vec<MultiPoly>) -> Result<Self, PolyError> {
        for p in &polys {
            if p.ctx() != ctx {
                return Err(PolyError::CtxMismatch(ctx, p.ctx()));
            }
            if p.nvars() != nvars {
                return Err(PolyError::ArityMismatch { expected: nvars, got: p.nvars() });
            }
        }
        Ok(PolySystem { ctx, nvars, polys })
    }

    /// `(x0, ..., x{n-1})`.
    pub fn identity(ctx: FieldCtx, n: usize) -> Self {
        let polys = (0..n).map(|i| MultiPoly::var(ctx, n, i)).collect();
        PolySystem { ctx, nvars: n, polys }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn into_polys(self) -> Vec<MultiPoly> {
        self.polys
    }

    pub fn get(&self, i: usize) -> &MultiPoly {
        &self.polys[i]
    }

    /// Componentwise maximum degree, -1 when every component is zero.
    pub fn degree(&self) -> i64 {
        self.polys.iter().map(MultiPoly::degree).max().unwrap_or(-1)
    }

    /// True when every nonzero component is homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.polys.iter().all(|p| p.is_zero() || (p.is_homogeneous() && p.degree() == d as i64))
    }

    /// `self ∘ inner`: component i is `self_i(inner_1, ..., inner_m)`.
    ///
    /// Power products of the inner polynomials are memoized, so each one is
    /// formed by a single multiplication from a smaller one.
    pub fn compose(&self, inner: &PolySystem) -> Result<PolySystem, PolyError> {
        if self.nvars != inner.len() {
            return Err(PolyError::ArityMismatch { expected: self.nvars, got: inner.len() });
        }
        if self.ctx != inner.ctx {
            return Err(PolyError::CtxMismatch(self.ctx, inner.ctx));
        }
        let mut products = PowerProducts::new(inner);
        let polys = self
            .polys
            .iter()
            .map(|g| {
                let mut acc = MultiPoly::zero(self.ctx, inner.nvars);
                for (m, c) in g.terms() {
                    let prod = products.get(m);
                    for (t, a) in prod.terms() {
                        acc.add_term(t.clone(), a * c);
                    }
                }
                acc
            })
            .collect();
        Ok(PolySystem { ctx: self.ctx, nvars: inner.nvars, polys })
    }

    pub fn evaluate(&self, point: &[FieldElem]) -> Result<Vec<FieldElem>, PolyError> {
        self.polys.iter().map(|p| p.evaluate(point)).collect()
    }

    /// All first partial derivatives `∂p_i/∂x_j`, ordered by component then
    /// variable.
    pub fn partials(&self) -> Vec<MultiPoly> {
        let mut out = Vec::with_capacity(self.polys.len() * self.nvars);
        for p in &self.polys {
            for j in 0..self.nvars {
                out.push(p.derivative(j).expect("index in range"));
            }
        }
        out
    }

    /// System homogenization to degree `d`: `(x0^d, x0^d·p_1(x/x0), ...)`
    /// over `nvars + 1` variables.
    pub fn homogenize(&self, d: u32) -> Result<PolySystem, PolyError> {
        let n1 = self.nvars + 1;
        let mut polys = Vec::with_capacity(self.polys.len() + 1);
        polys.push(MultiPoly::term(self.ctx, Monomial::var_pow(n1, 0, d as u16), self.ctx.one()));
        for p in &self.polys {
            polys.push(p.homogenize(d)?);
        }
        Ok(PolySystem { ctx: self.ctx, nvars: n1, polys })
    }

    /// Substitutes `x0 := 1` in every component. All components are kept.
    pub fn dehomogenize(&self) -> Result<PolySystem, PolyError> {
        let polys = self.polys.iter().map(MultiPoly::dehomogenize).collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem { ctx: self.ctx, nvars: self.nvars.saturating_sub(1), polys })
    }

    /// Drops the first `k` components.
    pub fn skip(&self, k: usize) -> PolySystem {
        PolySystem { ctx: self.ctx, nvars: self.nvars, polys: self.polys[k..].to_vec() }
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Memo of `inner^m` for monomials `m` over the inner system's arity.
struct PowerProducts<'a> {
    inner: &'a PolySystem,
    memo: HashMap<Monomial, MultiPoly>,
}

impl<'a> PowerProducts<'a> {
    fn new(inner: &'a PolySystem) -> Self {
        PowerProducts { inner, memo: HashMap::new() }
    }

    fn get(&mut self, m: &Monomial) -> &MultiPoly {
        if !self.memo.contains_key(m) {
            let value = self.build(m);
            self.memo.insert(m.clone(), value);
        }
        &self.memo[m]
    }

    fn build(&mut self, m: &Monomial) -> MultiPoly {
        let inner = self.inner;
        if m.is_one() {
            return MultiPoly::one(inner.ctx, inner.nvars);
        }
        let i = m.exponents().iter().rposition(|&e| e > 0).expect("nonconstant");
        let parent = m.div(&Monomial::var(m.nvars(), i)).expect("divisible");
        if parent.is_one() {
            return inner.polys[i].clone();
        }
        let base = self.get(&parent).clone();
        &base * &inner.polys[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn three_var_example() -> (PolySystem, PolySystem, PolySystem) {
        let k = q();
        let g = PolySystem::new(
            k,
            3,
            vec![
                MultiPoly::from_int_terms(k, 3, &[(1, &[1, 0, 1])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[2, 0, 0]), (1, &[1, 0, 1])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[1, 0, 1]), (1, &[0, 0, 2])]),
            ],
        )
        .unwrap();
        let h = PolySystem::new(
            k,
            3,
            vec![
                MultiPoly::from_int_terms(k, 3, &[(1, &[1, 1, 0])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[0, 2, 0])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[0, 1, 1])]),
            ],
        )
        .unwrap();
        let f = PolySystem::new(
            k,
            3,
            vec![
                MultiPoly::from_int_terms(k, 3, &[(1, &[1, 2, 1])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[2, 2, 0]), (1, &[1, 2, 1])]),
                MultiPoly::from_int_terms(k, 3, &[(1, &[1, 2, 1]), (1, &[0, 2, 2])]),
            ],
        )
        .unwrap();
        (f, g, h)
    }

    #[test]
    fn compose_worked_example() {
        let (f, g, h) = three_var_example();
        assert_eq!(g.compose(&h).unwrap(), f);
    }

    #[test]
    fn compose_with_identity() {
        let (_, _, h) = three_var_example();
        assert_eq!(PolySystem::identity(q(), 3).compose(&h).unwrap(), h);
        assert_eq!(h.compose(&PolySystem::identity(q(), 3)).unwrap(), h);
    }

    #[test]
    fn compose_arity_checked() {
        let (_, g, h) = three_var_example();
        let short = h.skip(1);
        assert!(matches!(g.compose(&short), Err(PolyError::ArityMismatch { .. })));
    }

    #[test]
    fn homogenize_system() {
        let k = q();
        let f = PolySystem::new(k, 2, vec![MultiPoly::from_int_terms(k, 2, &[(1, &[4, 0]), (1, &[0, 1])])]).unwrap();
        let fh = f.homogenize(4).unwrap();
        assert_eq!(fh.len(), 2);
        assert_eq!(fh.get(0), &MultiPoly::from_int_terms(k, 3, &[(1, &[4, 0, 0])]));
        assert_eq!(fh.get(1), &MultiPoly::from_int_terms(k, 3, &[(1, &[0, 4, 0]), (1, &[3, 0, 1])]));
        assert!(fh.is_homogeneous_of(4));
        assert!(matches!(f.homogenize(2), Err(PolyError::DegreeTooSmall { .. })));
    }

    #[test]
    fn homogeneous_input_is_unchanged_up_to_prefix() {
        let (f, _, _) = three_var_example();
        let fh = f.homogenize(4).unwrap();
        for (a, b) in f.polys().iter().zip(&fh.polys()[1..]) {
            assert_eq!(b.dehomogenize().unwrap(), *a);
            assert!(b.terms().all(|(m, _)| m.exp(0) == 0));
        }
    }
}
