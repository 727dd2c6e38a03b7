use std::cmp::Ordering;
use std::fmt;

/// A power product `x0^e0 * x1^e1 * ...` over a fixed number of variables.
///
/// Ordered graded-lex: total degree first, then the exponent vectors
/// lexicographically with `x0` most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u16>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars], degree: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::var_pow(nvars, i, 1)
    }

    pub fn var_pow(nvars: usize, i: usize, e: u16) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        Monomial { exps, degree: e as u32 }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other`, when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect();
        Some(Monomial { exps, degree: self.degree - other.degree })
    }

    /// Same monomial with exponent `e` on a new variable inserted at position 0.
    pub fn prepend(&self, e: u16) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + 1);
        exps.push(e);
        exps.extend_from_slice(&self.exps);
        Monomial { exps, degree: self.degree + e as u32 }
    }

    /// Drops variable `i` (substitutes it by 1).
    pub fn remove_var(&self, i: usize) -> Monomial {
        let mut exps = self.exps.clone();
        let e = exps.remove(i);
        Monomial { exps, degree: self.degree - e as u32 }
    }

    /// All monomials of total degree `d` in `nvars` variables, in
    /// descending graded-lex order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; nvars];
        fill(&mut cur, 0, d, &mut out);
        out
    }

    /// All monomials of degree at most `d`, descending graded-lex.
    pub fn all_up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        (0..=d).rev().flat_map(|k| Self::all_of_degree(nvars, k)).collect()
    }
}

// Emits exponent vectors of the remaining degree in descending lex order.
fn fill(cur: &mut Vec<u16>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining as u16;
        out.push(Monomial::new(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u16;
        fill(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        Ok(())
    }
}
