//! Dense exact linear algebra over a [`FieldCtx`].
//!
//! Entries are stored unboxed per field kind (`u64` residues or
//! `BigRational`), and a single generic elimination routine runs on either.
//! Pivots are chosen as the first nonzero entry in column order, so the
//! caller controls the echelon shape through the column order.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{add_mod, inv_mod, mul_mod, sub_mod, FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    CtxMismatch(FieldCtx, FieldCtx),
    #[error("linear system has no solution")]
    NoSolution,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Store {
    Gf(Vec<u64>),
    Q(Vec<BigRational>),
}

/// Row-major dense matrix over a field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    ctx: FieldCtx,
    nrows: usize,
    ncols: usize,
    data: Store,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    /// Reduced row echelon form, zero rows last.
    pub matrix: Matrix,
    /// Pivot column of each of the first `rank` rows, strictly increasing.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(ctx: FieldCtx, nrows: usize, ncols: usize) -> Self {
        let data = match ctx {
            FieldCtx::Prime(_) => Store::Gf(vec![0; nrows * ncols]),
            FieldCtx::Rationals => Store::Q(vec![BigRational::zero(); nrows * ncols]),
        };
        Matrix { ctx, nrows, ncols, data }
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, &ctx.one());
        }
        m
    }

    pub fn from_rows(ctx: FieldCtx, ncols: usize, rows: &[Vec<FieldElem>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(ctx, rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::DimMismatch(format!("row {i} has {} entries, expected {ncols}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                if x.ctx() != ctx {
                    return Err(LinalgError::CtxMismatch(ctx, x.ctx()));
                }
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    /// Integer entries, reduced into the field.
    pub fn from_i64_rows(ctx: FieldCtx, rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<FieldElem>> = rows.iter().map(|r| r.iter().map(|&v| ctx.from_i64(v)).collect()).collect();
        Self::from_rows(ctx, ncols, &rows).expect("rectangular input")
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        assert!(i < self.nrows && j < self.ncols);
        let k = i * self.ncols + j;
        match (&self.data, self.ctx) {
            (Store::Gf(d), FieldCtx::Prime(p)) => FieldElem::Gf { value: d[k], modulus: p },
            (Store::Q(d), _) => FieldElem::Rational(d[k].clone()),
            _ => unreachable!(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: &FieldElem) {
        assert!(i < self.nrows && j < self.ncols);
        let k = i * self.ncols + j;
        match (&mut self.data, x) {
            (Store::Gf(d), FieldElem::Gf { value, modulus }) if Some(*modulus) == self.ctx.modulus() => d[k] = *value,
            (Store::Q(d), FieldElem::Rational(r)) => d[k] = r.clone(),
            _ => panic!("element of {} stored in a matrix over {}", x.ctx(), self.ctx),
        }
    }

    pub fn is_zero_at(&self, i: usize, j: usize) -> bool {
        let k = i * self.ncols + j;
        match &self.data {
            Store::Gf(d) => d[k] == 0,
            Store::Q(d) => d[k].is_zero(),
        }
    }

    pub fn row(&self, i: usize) -> Vec<FieldElem> {
        (0..self.ncols).map(|j| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<FieldElem>> {
        (0..self.nrows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        (0..self.ncols).all(|j| self.is_zero_at(i, j))
    }

    /// Rows `[start, end)` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Matrix {
        self.select_rows(&(start..end).collect::<Vec<_>>())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let c = self.ncols;
        let data = match &self.data {
            Store::Gf(d) => Store::Gf(idx.iter().flat_map(|&i| d[i * c..(i + 1) * c].iter().copied()).collect()),
            Store::Q(d) => Store::Q(idx.iter().flat_map(|&i| d[i * c..(i + 1) * c].iter().cloned()).collect()),
        };
        Matrix { ctx: self.ctx, nrows: idx.len(), ncols: c, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.ctx, self.nrows, idx.len());
        for i in 0..self.nrows {
            for (jj, &j) in idx.iter().enumerate() {
                out.copy_entry(i, jj, self, i, j);
            }
        }
        out
    }

    fn copy_entry(&mut self, i: usize, j: usize, src: &Matrix, si: usize, sj: usize) {
        let k = i * self.ncols + j;
        let sk = si * src.ncols + sj;
        match (&mut self.data, &src.data) {
            (Store::Gf(d), Store::Gf(s)) => d[k] = s[sk],
            (Store::Q(d), Store::Q(s)) => d[k] = s[sk].clone(),
            _ => unreachable!(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same(other, "vstack")?;
        let data = match (&self.data, &other.data) {
            (Store::Gf(a), Store::Gf(b)) => Store::Gf(a.iter().chain(b).copied().collect()),
            (Store::Q(a), Store::Q(b)) => Store::Q(a.iter().chain(b).cloned().collect()),
            _ => unreachable!(),
        };
        Ok(Matrix { ctx: self.ctx, nrows: self.nrows + other.nrows, ncols: self.ncols, data })
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::CtxMismatch(self.ctx, other.ctx));
        }
        if self.nrows != other.nrows {
            return Err(LinalgError::DimMismatch(format!("hstack of {} and {} rows", self.nrows, other.nrows)));
        }
        let mut out = Matrix::zeros(self.ctx, self.nrows, self.ncols + other.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.copy_entry(i, j, self, i, j);
            }
            for j in 0..other.ncols {
                out.copy_entry(i, self.ncols + j, other, i, j);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.ctx, self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.copy_entry(j, i, self, i, j);
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::CtxMismatch(self.ctx, other.ctx));
        }
        if self.ncols != other.nrows {
            return Err(LinalgError::DimMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let (n, m, k) = (self.nrows, other.ncols, self.ncols);
        let data = match (&self.data, &other.data, self.ctx) {
            (Store::Gf(a), Store::Gf(b), FieldCtx::Prime(p)) => {
                let mut c = vec![0u64; n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = a[i * k + l];
                        if x == 0 {
                            continue;
                        }
                        for j in 0..m {
                            c[i * m + j] = add_mod(c[i * m + j], mul_mod(x, b[l * m + j], p), p);
                        }
                    }
                }
                Store::Gf(c)
            }
            (Store::Q(a), Store::Q(b), _) => {
                let mut c = vec![BigRational::zero(); n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = &a[i * k + l];
                        if x.is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            c[i * m + j] += x * &b[l * m + j];
                        }
                    }
                }
                Store::Q(c)
            }
            _ => unreachable!(),
        };
        Ok(Matrix { ctx: self.ctx, nrows: n, ncols: m, data })
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>, LinalgError> {
        let col = Matrix::from_rows(self.ctx, 1, &v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>())?;
        let out = self.mul(&col)?;
        Ok((0..out.nrows).map(|i| out.get(i, 0)).collect())
    }

    fn check_same(&self, other: &Matrix, what: &str) -> Result<(), LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::CtxMismatch(self.ctx, other.ctx));
        }
        if self.ncols != other.ncols {
            return Err(LinalgError::DimMismatch(format!("{what}: {} vs {} columns", self.ncols, other.ncols)));
        }
        Ok(())
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref {
        self.rref_limited(self.ncols)
    }

    /// Reduced row echelon form with pivots restricted to the first
    /// `pivot_cols` columns; the remaining columns are carried along.
    pub fn rref_limited(&self, pivot_cols: usize) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place(pivot_cols.min(self.ncols));
        let rank = pivots.len();
        Rref { matrix: m, pivots, rank }
    }

    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let (r, c) = (self.nrows, self.ncols);
        match (&mut self.data, self.ctx) {
            (Store::Gf(d), FieldCtx::Prime(p)) => eliminate(&GfOps(p), d, r, c, pivot_cols),
            (Store::Q(d), _) => eliminate(&QOps, d, r, c, pivot_cols),
            _ => unreachable!(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Nonzero rows of the RREF: the canonical basis of the row space.
    pub fn row_basis(&self) -> Matrix {
        let r = self.rref();
        r.matrix.row_range(0, r.rank)
    }

    /// Basis of `{x : self·x = 0}`, one vector per row, with free variables
    /// set to unit vectors.
    pub fn kernel(&self) -> Matrix {
        let r = self.rref();
        let is_pivot = pivot_mask(&r.pivots, self.ncols);
        let free: Vec<usize> = (0..self.ncols).filter(|&j| !is_pivot[j]).collect();
        let mut k = Matrix::zeros(self.ctx, free.len(), self.ncols);
        for (row, &fj) in free.iter().enumerate() {
            k.set(row, fj, &self.ctx.one());
            for (pi, &pc) in r.pivots.iter().enumerate() {
                let v = r.matrix.get(pi, fj);
                if !v.is_zero() {
                    k.set(row, pc, &-v);
                }
            }
        }
        k
    }

    /// One solution of `self·x = b` with free variables set to zero.
    pub fn solve(&self, b: &[FieldElem]) -> Result<Vec<FieldElem>, LinalgError> {
        if b.len() != self.nrows {
            return Err(LinalgError::DimMismatch(format!("rhs has {} entries, matrix has {} rows", b.len(), self.nrows)));
        }
        let rhs = Matrix::from_rows(self.ctx, 1, &b.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>())?;
        let x = self.solve_columns(&rhs)?;
        Ok((0..x.nrows).map(|i| x.get(i, 0)).collect())
    }

    /// Solves `self·X = rhs` for every column of `rhs` at once.
    /// Fails with `NoSolution` if any column is inconsistent.
    pub fn solve_columns(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        let aug = self.hstack(rhs)?;
        let r = aug.rref_limited(self.ncols);
        for i in r.rank..aug.nrows {
            if (self.ncols..aug.ncols).any(|j| !r.matrix.is_zero_at(i, j)) {
                return Err(LinalgError::NoSolution);
            }
        }
        let mut x = Matrix::zeros(self.ctx, self.ncols, rhs.ncols);
        for (i, &pc) in r.pivots.iter().enumerate() {
            for j in 0..rhs.ncols {
                x.copy_entry(pc, j, &r.matrix, i, self.ncols + j);
            }
        }
        Ok(x)
    }

    /// Tab-separated canonical text, one row per line.
    pub fn to_tsv(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\t"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tsv())
    }
}

fn pivot_mask(pivots: &[usize], ncols: usize) -> Vec<bool> {
    let mut mask = vec![false; ncols];
    for &p in pivots {
        mask[p] = true;
    }
    mask
}

/// True iff the row spaces coincide.
pub fn row_space_equal(a: &Matrix, b: &Matrix) -> Result<bool, LinalgError> {
    a.check_same(b, "row_space_equal")?;
    Ok(a.row_basis() == b.row_basis())
}

/// RREF basis of `rowspace(a) + rowspace(b)`.
pub fn row_space_sum(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    Ok(a.vstack(b)?.row_basis())
}

/// RREF basis of `rowspace(a) ∩ rowspace(b)` by Zassenhaus: eliminate
/// `[[a, a], [b, 0]]`; the rows whose left half vanishes carry the
/// intersection in their right half.
pub fn row_space_intersect(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    a.check_same(b, "row_space_intersect")?;
    let n = a.ncols;
    let top = a.hstack(a)?;
    let bottom = b.hstack(&Matrix::zeros(b.ctx, b.nrows, n))?;
    let r = top.vstack(&bottom)?.rref();
    let right: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..r.rank).filter(|&i| r.pivots[i] >= n).collect();
    Ok(r.matrix.select_rows(&rows).select_cols(&right).row_basis())
}

/// Scalar operations for the elimination kernel.
trait ElimOps {
    type E: Clone;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a - f·b`
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Self::E;
    fn is_one(&self, a: &Self::E) -> bool;
}

struct GfOps(u64);

impl ElimOps for GfOps {
    type E = u64;
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        sub_mod(*a, mul_mod(*f, *b, self.0), self.0)
    }
    fn is_one(&self, a: &u64) -> bool {
        *a == 1
    }
}

struct QOps;

impl ElimOps for QOps {
    type E = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub_mul(&self, a: &BigRational, f: &BigRational, b: &BigRational) -> BigRational {
        a - f * b
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
}

/// Gauss-Jordan elimination in place. Returns the pivot columns.
fn eliminate<O: ElimOps>(ops: &O, d: &mut [O::E], nrows: usize, ncols: usize, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..pivot_cols {
        if row == nrows {
            break;
        }
        let Some(src) = (row..nrows).find(|&i| !ops.is_zero(&d[i * ncols + col])) else {
            continue;
        };
        if src != row {
            for j in 0..ncols {
                d.swap(src * ncols + j, row * ncols + j);
            }
        }
        let lead = d[row * ncols + col].clone();
        if !ops.is_one(&lead) {
            let inv = ops.inv(&lead);
            for j in col..ncols {
                let k = row * ncols + j;
                if !ops.is_zero(&d[k]) {
                    d[k] = ops.mul(&d[k], &inv);
                }
            }
        }
        let (before, rest) = d.split_at_mut(row * ncols);
        let (pivot_row, after) = rest.split_at_mut(ncols);
        let nz: Vec<usize> = (col..ncols).filter(|&j| !ops.is_zero(&pivot_row[j])).collect();
        for other in before.chunks_mut(ncols).chain(after.chunks_mut(ncols)) {
            let f = other[col].clone();
            if ops.is_zero(&f) {
                continue;
            }
            for &j in &nz {
                other[j] = ops.sub_mul(&other[j], &f, &pivot_row[j]);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}
