//! Sparse multivariate polynomials and polynomial systems.
//!
//! Variables are indexed from 0 and printed as `x0, x1, ...`. When a
//! system is homogenized the new variable is inserted at index 0, so the
//! homogenizing variable is always `x0`.

pub mod codec;
mod monomial;
mod multipoly;
mod system;

use thiserror::Error;

use crate::field::{FieldCtx, FieldError};

pub use monomial::Monomial;
pub use multipoly::MultiPoly;
pub use system::PolySystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("field mismatch: {0} vs {1}")]
    CtxMismatch(FieldCtx, FieldCtx),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("target degree {target} is below the polynomial degree {degree}")]
    DegreeTooSmall { degree: i64, target: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}
