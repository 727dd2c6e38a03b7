//! Functional decomposition of quartic multivariate polynomial systems.
//!
//! Given `f = (f_1, ..., f_n)` of degree four, find quadratic `g` and `h`
//! with `f = g ∘ h`. The pipeline differentiates `f`, takes the quotient of
//! the resulting space of cubics by a linear form to recover the span of
//! `h`, and then solves a linear system for `g`. The affine case goes
//! through homogenization.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod polyspace;
pub mod decomposer;
pub mod instancegen;
pub mod oracles;
pub mod cli;
