//! JSON form of polynomials and systems.
//!
//! ```text
//! poly:   {"field":"gf:7","nvars":3,"terms":[[[2,1,0],"3"], ...]}
//! system: {"field":"gf:7","nvars":3,"polys":[[[[2,1,0],"3"], ...], ...]}
//! ```
//!
//! Terms are written in descending graded-lex order, so output is
//! deterministic. Parsing rejects exponent vectors of the wrong length,
//! repeated monomials and coefficients outside the field's canonical range.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::field::FieldCtx;

use super::{Monomial, MultiPoly, PolySystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// `line:column` for syntax errors, a JSON path for semantic ones.
    pub position: String,
    pub message: String,
}

impl ParseError {
    fn at(position: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError { position: position.into(), message: message.into() }
    }
}

type RawTerm = (Vec<u64>, String);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    field: String,
    nvars: usize,
    polys: Vec<Vec<RawTerm>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoly {
    field: String,
    nvars: usize,
    terms: Vec<RawTerm>,
}

fn raw_terms(p: &MultiPoly) -> Vec<RawTerm> {
    p.terms().map(|(m, c)| (m.exponents().iter().map(|&e| e as u64).collect(), c.to_string())).collect()
}

pub fn poly_to_json(p: &MultiPoly) -> Value {
    serde_json::to_value(RawPoly { field: p.ctx().to_string(), nvars: p.nvars(), terms: raw_terms(p) })
        .expect("serializable")
}

pub fn system_to_json(s: &PolySystem) -> Value {
    let raw = RawSystem { field: s.ctx().to_string(), nvars: s.nvars(), polys: s.polys().iter().map(raw_terms).collect() };
    serde_json::to_value(raw).expect("serializable")
}

pub fn system_to_string(s: &PolySystem) -> String {
    serde_json::to_string(&system_to_json(s)).expect("serializable")
}

fn syntax(e: serde_json::Error) -> ParseError {
    ParseError::at(format!("{}:{}", e.line(), e.column()), e.to_string())
}

fn field(text: &str) -> Result<FieldCtx, ParseError> {
    text.parse().map_err(|e: crate::field::FieldError| ParseError::at("field", e.to_string()))
}

fn build_poly(ctx: FieldCtx, nvars: usize, terms: &[RawTerm], path: &str) -> Result<MultiPoly, ParseError> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(terms.len());
    for (t, (exps, coeff)) in terms.iter().enumerate() {
        let here = format!("{path}[{t}]");
        if exps.len() != nvars {
            return Err(ParseError::at(here, format!("exponent vector has length {}, expected {nvars}", exps.len())));
        }
        let exps: Vec<u16> = exps
            .iter()
            .map(|&e| u16::try_from(e).map_err(|_| ParseError::at(here.clone(), format!("exponent {e} too large"))))
            .collect::<Result<_, _>>()?;
        let m = Monomial::new(exps);
        if !seen.insert(m.clone()) {
            return Err(ParseError::at(here, format!("repeated monomial {m}")));
        }
        let c = ctx.parse_elem(coeff).map_err(|e| ParseError::at(here, e.to_string()))?;
        out.push((m, c));
    }
    Ok(MultiPoly::from_terms(ctx, nvars, out).expect("validated terms"))
}

pub fn poly_from_str(text: &str) -> Result<MultiPoly, ParseError> {
    let raw: RawPoly = serde_json::from_str(text).map_err(syntax)?;
    build_poly(field(&raw.field)?, raw.nvars, &raw.terms, "terms")
}

pub fn system_from_str(text: &str) -> Result<PolySystem, ParseError> {
    let raw: RawSystem = serde_json::from_str(text).map_err(syntax)?;
    system_from_raw(raw)
}

pub fn system_from_json(v: &Value) -> Result<PolySystem, ParseError> {
    let raw: RawSystem = serde_json::from_value(v.clone()).map_err(|e| ParseError::at("$", e.to_string()))?;
    system_from_raw(raw)
}

fn system_from_raw(raw: RawSystem) -> Result<PolySystem, ParseError> {
    let ctx = field(&raw.field)?;
    let polys = raw
        .polys
        .iter()
        .enumerate()
        .map(|(i, terms)| build_poly(ctx, raw.nvars, terms, &format!("polys[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolySystem::new(ctx, raw.nvars, polys).expect("validated polys"))
}
