use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{FieldCtx, FieldElem};

use super::{Monomial, PolyError};

/// A sparse polynomial over a [`FieldCtx`]. Zero coefficients are never
/// stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    ctx: FieldCtx,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl MultiPoly {
    pub fn zero(ctx: FieldCtx, nvars: usize) -> Self {
        MultiPoly { ctx, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: FieldCtx, nvars: usize, c: FieldElem) -> Self {
        Self::term(ctx, Monomial::one(nvars), c)
    }

    pub fn one(ctx: FieldCtx, nvars: usize) -> Self {
        Self::constant(ctx, nvars, ctx.one())
    }

    pub fn var(ctx: FieldCtx, nvars: usize, i: usize) -> Self {
        Self::term(ctx, Monomial::var(nvars, i), ctx.one())
    }

    pub fn term(ctx: FieldCtx, m: Monomial, c: FieldElem) -> Self {
        debug_assert_eq!(c.ctx(), ctx);
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { ctx, nvars, terms }
    }

    /// Builds a polynomial from (monomial, coefficient) pairs. Repeated
    /// monomials are summed and zero results dropped.
    pub fn from_terms<I>(ctx: FieldCtx, nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        let mut p = Self::zero(ctx, nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::ArityMismatch { expected: nvars, got: m.nvars() });
            }
            if c.ctx() != ctx {
                return Err(PolyError::CtxMismatch(ctx, c.ctx()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer coefficients and exponent slices.
    pub fn from_int_terms(ctx: FieldCtx, nvars: usize, terms: &[(i64, &[u16])]) -> Self {
        let mut p = Self::zero(ctx, nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial::new(e.to_vec()), ctx.from_i64(*c));
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().next_back().map_or(-1, |m| m.degree() as i64)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|m| m.degree() as i64 == d)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= 0
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElem)> + '_ {
        self.terms.iter().rev()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.keys().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back()
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.ctx != other.ctx {
            return Err(PolyError::CtxMismatch(self.ctx, other.ctx));
        }
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = Self::zero(self.ctx, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.ctx, self.nvars);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        MultiPoly { ctx: self.ctx, nvars: self.nvars, terms }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let terms = self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect();
        MultiPoly { ctx: self.ctx, nvars: self.nvars, terms }
    }

    /// Exact division by a monomial; `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            terms.insert(t.div(m)?, c.clone());
        }
        Some(MultiPoly { ctx: self.ctx, nvars: self.nvars, terms })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.ctx, self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `j` (0-based).
    pub fn derivative(&self, j: usize) -> Result<Self, PolyError> {
        if j >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index: j, nvars: self.nvars });
        }
        let mut out = Self::zero(self.ctx, self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(j);
            if e == 0 {
                continue;
            }
            let lowered = m.div(&Monomial::var(self.nvars, j)).expect("divisible");
            out.add_term(lowered, c * &self.ctx.from_u64(e as u64));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, got: point.len() });
        }
        if let Some(bad) = point.iter().find(|x| x.ctx() != self.ctx) {
            return Err(PolyError::CtxMismatch(self.ctx, bad.ctx()));
        }
        let mut acc = self.ctx.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `x0^d * p(x1/x0, ..., xn/x0)` over `nvars + 1` variables, with the
    /// new variable at index 0.
    pub fn homogenize(&self, d: u32) -> Result<Self, PolyError> {
        if self.degree() > d as i64 {
            return Err(PolyError::DegreeTooSmall { degree: self.degree(), target: d });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.prepend((d - m.degree()) as u16), c.clone()))
            .collect();
        Ok(MultiPoly { ctx: self.ctx, nvars: self.nvars + 1, terms })
    }

    /// Substitutes `x0 := 1` and drops that variable.
    pub fn dehomogenize(&self) -> Result<Self, PolyError> {
        if self.nvars == 0 {
            return Err(PolyError::IndexOutOfRange { index: 0, nvars: 0 });
        }
        let mut out = Self::zero(self.ctx, self.nvars - 1);
        for (m, c) in &self.terms {
            out.add_term(m.remove_var(0), c.clone());
        }
        Ok(out)
    }

    /// Drops the constant term.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Monomial::one(self.nvars));
        out
    }

    /// Scales so the leading coefficient is 1. The zero polynomial is
    /// returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical text: terms in descending graded-lex order joined by
    /// `" + "`, e.g. `3*x1^2*x2 + x3 + 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        MultiPoly { ctx: self.ctx, nvars: self.nvars, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    #[test]
    fn difference_of_squares() {
        let x = MultiPoly::var(q(), 2, 0);
        let y = MultiPoly::var(q(), 2, 1);
        let lhs = &(&x + &y) * &(&x - &y);
        let rhs = &(&x * &x) - &(&y * &y);
        assert_eq!(lhs, rhs);
        assert_eq!(&lhs + &MultiPoly::zero(q(), 2), lhs);
    }

    #[test]
    fn binomial_fourth_power() {
        let p = &MultiPoly::var(q(), 1, 0) + &MultiPoly::one(q(), 1);
        let p4 = p.pow(4);
        let coeffs: Vec<String> = p4.terms().map(|(_, c)| c.to_string()).collect();
        assert_eq!(coeffs, ["1", "4", "6", "4", "1"]);
        assert_eq!(p4.degree(), 4);
    }

    #[test]
    fn derivative_power_rule() {
        let f = MultiPoly::from_int_terms(q(), 3, &[(1, &[1, 2, 1])]);
        let fy = f.derivative(1).unwrap();
        assert_eq!(fy, MultiPoly::from_int_terms(q(), 3, &[(2, &[1, 1, 1])]));
        let c = MultiPoly::constant(q(), 3, q().from_i64(7));
        assert!(c.derivative(0).unwrap().is_zero());
        assert!(matches!(f.derivative(3), Err(PolyError::IndexOutOfRange { .. })));
    }

    #[test]
    fn evaluation() {
        let p = MultiPoly::from_int_terms(q(), 2, &[(1, &[2, 0]), (1, &[0, 1])]);
        let pt = [q().from_i64(2), q().from_i64(3)];
        assert_eq!(p.evaluate(&pt).unwrap(), q().from_i64(7));
        let with_const = &p + &MultiPoly::constant(q(), 2, q().from_i64(-5));
        assert_eq!(with_const.evaluate(&[q().zero(), q().zero()]).unwrap(), q().from_i64(-5));
        assert!(p.evaluate(&pt[..1]).is_err());
    }

    #[test]
    fn text_form() {
        let k = FieldCtx::prime(7).unwrap();
        let p = MultiPoly::from_int_terms(k, 4, &[(3, &[0, 2, 1, 0]), (1, &[0, 0, 0, 1]), (5, &[0, 0, 0, 0])]);
        assert_eq!(p.to_string(), "3*x1^2*x2 + x3 + 5");
        assert_eq!(MultiPoly::zero(k, 2).to_string(), "0");
        assert_eq!(MultiPoly::zero(k, 2).degree(), -1);
    }

    #[test]
    fn homogenize_single() {
        let f = MultiPoly::from_int_terms(q(), 2, &[(1, &[4, 0]), (1, &[0, 1])]);
        let h = f.homogenize(4).unwrap();
        assert_eq!(h, MultiPoly::from_int_terms(q(), 3, &[(1, &[0, 4, 0]), (1, &[3, 0, 1])]));
        assert!(h.is_homogeneous());
        assert_eq!(h.dehomogenize().unwrap(), f);
        assert!(matches!(f.homogenize(3), Err(PolyError::DegreeTooSmall { .. })));
    }

    #[test]
    fn dehomogenize_substitutes_one() {
        let p = MultiPoly::from_int_terms(q(), 2, &[(1, &[2, 0]), (1, &[1, 1]), (1, &[0, 2])]);
        let expect = MultiPoly::from_int_terms(q(), 1, &[(1, &[0]), (1, &[1]), (1, &[2])]);
        assert_eq!(p.dehomogenize().unwrap(), expect);
        let x04 = MultiPoly::from_int_terms(q(), 2, &[(1, &[4, 0])]);
        assert_eq!(x04.dehomogenize().unwrap(), MultiPoly::one(q(), 1));
    }
}
