//! Exact scalar arithmetic: prime fields GF(p) and the rationals.
//!
//! Every coefficient in the crate is a [`FieldElem`]. Elements carry enough
//! information to identify their field (the modulus for GF(p)), so mixing
//! elements of different fields is detected. The checked methods return
//! [`FieldError::CtxMismatch`]; the operator impls panic instead, and are
//! meant for code that has already validated its inputs.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported prime modulus.
pub const MAX_MODULUS: u64 = (1 << 61) - 1;

/// Default half-width of the integer range used when sampling rationals.
pub const DEFAULT_RATIONAL_BOUND: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    CtxMismatch(FieldCtx, FieldCtx),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus {0} exceeds the supported maximum 2^61-1")]
    ModulusTooLarge(u64),
    #[error("invalid field spec {0:?} (expected \"gf:<p>\" or \"q\")")]
    BadSpec(String),
    #[error("invalid element {text:?} for {ctx}")]
    BadElement { text: String, ctx: FieldCtx },
}

/// The field all coefficients of a computation live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldCtx {
    Prime(u64),
    Rationals,
}

impl FieldCtx {
    /// GF(p). Rejects composite moduli, characteristic 2 and p > 2^61-1.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p > MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if p < 3 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(FieldCtx::Prime(p))
    }

    pub fn rationals() -> Self {
        FieldCtx::Rationals
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldCtx::Prime(p) => Some(*p),
            FieldCtx::Rationals => None,
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, FieldCtx::Prime(_))
    }

    /// Field size for prime fields, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        self.modulus()
    }

    pub fn zero(&self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        match *self {
            FieldCtx::Prime(p) => {
                let r = (v as i128).rem_euclid(p as i128) as u64;
                FieldElem::Gf { value: r, modulus: p }
            }
            FieldCtx::Rationals => FieldElem::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> FieldElem {
        match *self {
            FieldCtx::Prime(p) => FieldElem::Gf { value: v % p, modulus: p },
            FieldCtx::Rationals => FieldElem::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// Builds n/d. Fails when d maps to zero in the field.
    pub fn from_fraction(&self, n: i64, d: i64) -> Result<FieldElem, FieldError> {
        self.from_i64(n).checked_div(&self.from_i64(d))
    }

    /// Parses the canonical text form: a residue in `[0, p)` for GF(p),
    /// an integer or `num/den` for the rationals.
    pub fn parse_elem(&self, text: &str) -> Result<FieldElem, FieldError> {
        let bad = || FieldError::BadElement { text: text.to_string(), ctx: *self };
        let t = text.trim();
        match *self {
            FieldCtx::Prime(p) => {
                let v: u64 = t.parse().map_err(|_| bad())?;
                if v >= p {
                    return Err(bad());
                }
                Ok(FieldElem::Gf { value: v, modulus: p })
            }
            FieldCtx::Rationals => {
                let (n, d) = match t.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (t, "1"),
                };
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(FieldElem::Rational(BigRational::new(n, d)))
            }
        }
    }

    /// Uniform draw from GF(p); for the rationals a uniform integer in
    /// `[-DEFAULT_RATIONAL_BOUND, DEFAULT_RATIONAL_BOUND]`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.sample_bounded(rng, DEFAULT_RATIONAL_BOUND)
    }

    /// Like [`sample_uniform`](Self::sample_uniform) with an explicit
    /// integer range `[-bound, bound]` for the rationals. The bound is
    /// ignored for prime fields.
    pub fn sample_bounded<R: Rng + ?Sized>(&self, rng: &mut R, bound: u64) -> FieldElem {
        match *self {
            FieldCtx::Prime(p) => FieldElem::Gf { value: rng.gen_range(0..p), modulus: p },
            FieldCtx::Rationals => {
                let b = bound.min(i64::MAX as u64) as i64;
                self.from_i64(rng.gen_range(-b..=b))
            }
        }
    }

    /// Uniform draw from the nonzero elements.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        loop {
            let x = self.sample_uniform(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// True when `e` belongs to this field and is in canonical form.
    pub fn contains(&self, e: &FieldElem) -> bool {
        match (self, e) {
            (FieldCtx::Prime(p), FieldElem::Gf { value, modulus }) => p == modulus && value < p,
            (FieldCtx::Rationals, FieldElem::Rational(r)) => r.denom().is_positive(),
            _ => false,
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Prime(p) => write!(f, "gf:{p}"),
            FieldCtx::Rationals => write!(f, "q"),
        }
    }
}

impl FromStr for FieldCtx {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldCtx::Rationals);
        }
        let p = s
            .strip_prefix("gf:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| FieldError::BadSpec(s.to_string()))?;
        FieldCtx::prime(p)
    }
}

impl Serialize for FieldCtx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldCtx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A canonical field element: residue in `[0, p)` or a reduced fraction
/// with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Gf { value: u64, modulus: u64 },
    Rational(BigRational),
}

impl FieldElem {
    pub fn ctx(&self) -> FieldCtx {
        match self {
            FieldElem::Gf { modulus, .. } => FieldCtx::Prime(*modulus),
            FieldElem::Rational(_) => FieldCtx::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Gf { value, .. } => *value == 0,
            FieldElem::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Gf { value, .. } => *value == 1,
            FieldElem::Rational(r) => r.is_one(),
        }
    }

    /// Residue for GF(p) elements.
    pub fn residue(&self) -> Option<u64> {
        match self {
            FieldElem::Gf { value, .. } => Some(*value),
            FieldElem::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(r) => Some(r),
            FieldElem::Gf { .. } => None,
        }
    }

    fn same_ctx(&self, other: &Self) -> Result<(), FieldError> {
        match (self, other) {
            (FieldElem::Gf { modulus: a, .. }, FieldElem::Gf { modulus: b, .. }) if a == b => Ok(()),
            (FieldElem::Rational(_), FieldElem::Rational(_)) => Ok(()),
            _ => Err(FieldError::CtxMismatch(self.ctx(), other.ctx())),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(match (self, other) {
            (FieldElem::Gf { value: a, modulus: p }, FieldElem::Gf { value: b, .. }) => {
                FieldElem::Gf { value: add_mod(*a, *b, *p), modulus: *p }
            }
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(match (self, other) {
            (FieldElem::Gf { value: a, modulus: p }, FieldElem::Gf { value: b, .. }) => {
                FieldElem::Gf { value: sub_mod(*a, *b, *p), modulus: *p }
            }
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a - b),
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(match (self, other) {
            (FieldElem::Gf { value: a, modulus: p }, FieldElem::Gf { value: b, .. }) => {
                FieldElem::Gf { value: mul_mod(*a, *b, *p), modulus: *p }
            }
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Gf { value, modulus } => {
                FieldElem::Gf { value: inv_mod(*value, *modulus), modulus: *modulus }
            }
            FieldElem::Rational(r) => FieldElem::Rational(r.recip()),
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.ctx().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical text: decimal residue, or `num/den` (`num` alone when the
    /// denominator is 1).
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Gf { value, .. } => write!(f, "{value}"),
            FieldElem::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Gf { value, modulus } => {
                FieldElem::Gf { value: sub_mod(0, *value, *modulus), modulus: *modulus }
            }
            FieldElem::Rational(r) => FieldElem::Rational(-r),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat. `a` must be nonzero.
#[inline]
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, exact for every u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
