//! Brute-force reference computations and Monte Carlo campaigns.
//!
//! Everything here uses the hidden right factor directly (or plain
//! enumeration), so it can serve as ground truth for the fast pipelines.

use std::fmt;
use std::ops::Range;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::decomposer::{decompose_homogeneous, fdpmp4, solve_left_factor, DecomposeOptions};
use crate::field::{FieldCtx, FieldElem, DEFAULT_RATIONAL_BOUND};
use crate::instancegen::{gen_decomposable, random_system, GenSpec};
use crate::poly::{Monomial, MultiPoly, PolySystem};
use crate::polyspace::{build_vtilde, PolySpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("exhaustive search needs a prime field")]
    NotFinite,
    #[error("cannot merge reports with different parameters")]
    MergeMismatch,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// `span{x_i·h_j}`.
pub fn brute_vf(h: &PolySystem) -> PolySpace {
    brute_vfd(h, 0)
}

/// `span{m·h_j : deg m = d + 1}`.
pub fn brute_vfd(h: &PolySystem, d: u32) -> PolySpace {
    multiples(h, d + 1)
}

/// `span{m·h_j : deg m = k}`.
fn multiples(h: &PolySystem, k: u32) -> PolySpace {
    let mut gens = Vec::new();
    for m in Monomial::all_of_degree(h.nvars(), k) {
        gens.extend(h.polys().iter().map(|p| p.mul_monomial(&m)));
    }
    PolySpace::span(h.ctx(), h.nvars(), &gens).expect("consistent system")
}

/// Whether `(Σ x_i W : L) = W` for `W = span(w)`.
pub fn conjecture_y_holds(w: &PolySystem) -> bool {
    let target = PolySpace::span(w.ctx(), w.nvars(), w.polys()).expect("consistent system");
    brute_vf(w).quotient_by_variables().map(|q| q == target).unwrap_or(false)
}

/// `n` random quadratic forms in `n` variables.
fn random_quadratic_forms(ctx: FieldCtx, n: usize, seed: u64) -> PolySystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_system(ctx, n, n, 2, true, DEFAULT_RATIONAL_BOUND, &mut rng)
}

/// One trial of the quotient-by-linear-forms event for a random `W`.
pub fn conjecture_y_trial(n: usize, ctx: FieldCtx, seed: u64) -> bool {
    conjecture_y_holds(&random_quadratic_forms(ctx, n, seed))
}

/// One trial of `(U(h,d') : x_1^{d'}) = span(h)` for random forms `h` of
/// degree `d_h`, where `U(h,d') = span{m·h_i : deg m = d'}`. The
/// hypotheses `d' < d_h`, `n > 2 d_h` are enforced unless `allow_violation`.
pub fn power_quotient_trial(
    n: usize,
    d_h: u32,
    d_prime: u32,
    ctx: FieldCtx,
    seed: u64,
    allow_violation: bool,
) -> Result<bool, OracleError> {
    if !allow_violation {
        if d_prime >= d_h {
            return Err(OracleError::HypothesisViolated(format!("d' = {d_prime} must be below d_h = {d_h}")));
        }
        if n <= 2 * d_h as usize {
            return Err(OracleError::HypothesisViolated(format!("n = {n} must exceed 2 d_h = {}", 2 * d_h)));
        }
    }
    if n == 0 || d_h == 0 || d_prime == 0 {
        return Err(OracleError::InvalidParams("n, d_h and d' must be positive".into()));
    }
    let power = u16::try_from(d_prime).map_err(|_| OracleError::InvalidParams("d' too large".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_system(ctx, n, n, d_h, true, DEFAULT_RATIONAL_BOUND, &mut rng);
    let w = PolySpace::span(ctx, n, h.polys()).expect("consistent system");
    Ok(multiples(&h, d_prime).quotient_by_power(0, power).map(|q| q == w).unwrap_or(false))
}

/// `h_i = x_i^2` and `f_i = Σ_{k,l} (k+l)^i x_k^2 x_l^2` (1-based indices).
pub fn squares_specialization(ctx: FieldCtx, n: usize) -> (PolySystem, PolySystem) {
    let sq = |i: usize| Monomial::var_pow(n, i, 2);
    let h = PolySystem::new(ctx, n, (0..n).map(|i| MultiPoly::term(ctx, sq(i), ctx.one())).collect()).expect("valid");
    let f = (1..=n as u64)
        .map(|i| {
            let mut p = MultiPoly::zero(ctx, n);
            for k in 0..n {
                for l in 0..n {
                    let c = ctx.from_u64((k + l + 2) as u64).pow(i);
                    p = &p + &MultiPoly::term(ctx, sq(k).mul(&sq(l)), c);
                }
            }
            p
        })
        .collect();
    (PolySystem::new(ctx, n, f).expect("valid"), h)
}

fn gaussian_binomial(q: u128, m: u32, k: u32) -> u128 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow(m - i).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow(i + 1) - 1);
    }
    if num == u128::MAX {
        u128::MAX
    } else {
        num / den
    }
}

/// Number of subspaces [`exhaustive_decompose`] would examine.
pub fn exhaustive_candidates(ctx: FieldCtx, n: usize) -> Result<u128, OracleError> {
    let q = ctx.order().ok_or(OracleError::NotFinite)? as u128;
    let m = Monomial::all_up_to_degree(n, 2).len() as u32 - 1;
    Ok((1..=n.min(m as usize) as u32).fold(0u128, |acc, k| acc.saturating_add(gaussian_binomial(q, m, k))))
}

/// Every quadratic decomposition of `f` up to equivalence: enumerates each
/// subspace of dimension `1..=n` of constant-free polynomials of degree at
/// most two (via its reduced echelon basis) and keeps those admitting a
/// left factor. Constants in `h` and a change of basis are absorbed by `g`,
/// so this covers all quadratic `(g, h)`.
pub fn exhaustive_decompose(f: &PolySystem, budget: u128) -> Result<Vec<(PolySystem, PolySystem)>, OracleError> {
    let ctx = f.ctx();
    let n = f.nvars();
    let needed = exhaustive_candidates(ctx, n)?;
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let q = ctx.order().expect("finite field");
    let cols: Vec<Monomial> = Monomial::all_up_to_degree(n, 2).into_iter().filter(|m| !m.is_one()).collect();
    let elems: Vec<FieldElem> = (0..q).map(|v| ctx.from_u64(v)).collect();
    let mut hits = Vec::new();
    for k in 1..=n.min(cols.len()) {
        for pivots in combinations(cols.len(), k) {
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let pivots = &pivots;
                    ((pivots[r] + 1)..cols.len()).filter(move |j| !pivots.contains(j)).map(move |j| (r, j))
                })
                .collect();
            let mut digits = vec![0usize; free.len()];
            loop {
                let basis: Vec<MultiPoly> = (0..k)
                    .map(|r| {
                        let mut terms = vec![(cols[pivots[r]].clone(), ctx.one())];
                        for (slot, &(row, j)) in free.iter().enumerate() {
                            if row == r {
                                terms.push((cols[j].clone(), elems[digits[slot]].clone()));
                            }
                        }
                        MultiPoly::from_terms(ctx, n, terms).expect("valid")
                    })
                    .collect();
                let mut padded = basis.clone();
                padded.resize(n, basis[0].clone());
                let h = PolySystem::new(ctx, n, padded).expect("valid");
                if let Ok(g) = solve_left_factor(f, &h, 2) {
                    hits.push((g, h));
                }
                if !advance(&mut digits, q as usize) {
                    break;
                }
            }
        }
    }
    Ok(hits)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// The randomized experiments a campaign can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    /// `(Σ x_i W : L) = W` for random quadratic forms `W`.
    ConjectureY,
    /// `(U(h,d') : x_1^{d'}) = span(h)`.
    PowerQuotient,
    /// The partials of `g ∘ h` span all of `x_i h_j` (homogeneous).
    VtildeEqualsVf,
    /// `decompose_homogeneous` verifies a random homogeneous instance.
    Homogeneous,
    /// `fdpmp4` verifies a random affine instance.
    Fdpmp4,
}

impl Campaign {
    pub const ALL: [Campaign; 5] =
        [Campaign::ConjectureY, Campaign::PowerQuotient, Campaign::VtildeEqualsVf, Campaign::Homogeneous, Campaign::Fdpmp4];

    pub fn name(&self) -> &'static str {
        match self {
            Campaign::ConjectureY => "conjecture-y",
            Campaign::PowerQuotient => "power-quotient",
            Campaign::VtildeEqualsVf => "vtilde-vf",
            Campaign::Homogeneous => "homogeneous",
            Campaign::Fdpmp4 => "fdpmp4",
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Campaign::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<_> = Campaign::ALL.iter().map(|c| c.name()).collect();
            format!("unknown campaign '{s}', expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignParams {
    pub campaign: Campaign,
    pub field: FieldCtx,
    pub n: usize,
    pub d_h: u32,
    pub d_prime: u32,
    /// Run [`power_quotient_trial`] outside its hypotheses.
    pub allow_violation: bool,
}

impl CampaignParams {
    pub fn new(campaign: Campaign, field: FieldCtx, n: usize) -> Self {
        CampaignParams { campaign, field, n, d_h: 2, d_prime: 1, allow_violation: false }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n < 2 {
            return Err(OracleError::InvalidParams(format!("n = {} must be at least 2", self.n)));
        }
        if self.campaign == Campaign::PowerQuotient && !self.allow_violation {
            if self.d_prime >= self.d_h {
                return Err(OracleError::HypothesisViolated(format!("d' = {} must be below d_h = {}", self.d_prime, self.d_h)));
            }
            if self.n <= 2 * self.d_h as usize {
                return Err(OracleError::HypothesisViolated(format!("n = {} must exceed 2 d_h = {}", self.n, 2 * self.d_h)));
            }
        }
        Ok(())
    }

    /// Success-probability lower bound from the degree arguments:
    /// `1 - 2n²/q` for the quadratic events and `1 - N/q` with
    /// `N = (n-1)·C(n+d_h+d'-2, d_h+d')` for the higher-degree one.
    /// One over ℚ; `None` where no bound is known.
    pub fn bound(&self) -> Option<BigRational> {
        let degree: BigInt = match self.campaign {
            Campaign::ConjectureY | Campaign::VtildeEqualsVf | Campaign::Homogeneous => BigInt::from(2 * self.n * self.n),
            Campaign::PowerQuotient => {
                let top = self.n as u64 + self.d_h as u64 + self.d_prime as u64 - 2;
                BigInt::from(self.n as u64 - 1) * binomial(top, self.d_h as u64 + self.d_prime as u64)
            }
            Campaign::Fdpmp4 => return None,
        };
        Some(match self.field.order() {
            Some(q) => BigRational::one() - BigRational::new(degree, BigInt::from(q)),
            None => BigRational::one(),
        })
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Aggregated outcome of a seed range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub params: CampaignParams,
    pub trials: u64,
    pub successes: u64,
    /// Seeds covered, half-open. Merged reports span the union.
    pub seeds: Range<u64>,
    pub failed_seeds: Vec<u64>,
}

impl TrialReport {
    pub fn empty(params: CampaignParams, start: u64) -> Self {
        TrialReport { params, trials: 0, successes: 0, seeds: start..start, failed_seeds: Vec::new() }
    }

    pub fn single(params: CampaignParams, seed: u64, success: bool) -> Self {
        TrialReport {
            params,
            trials: 1,
            successes: success as u64,
            seeds: seed..seed + 1,
            failed_seeds: if success { Vec::new() } else { vec![seed] },
        }
    }

    /// `successes / trials` exactly; zero for an empty report.
    pub fn rate(&self) -> BigRational {
        if self.trials == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.successes), BigInt::from(self.trials))
    }

    pub fn rate_f64(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn bound(&self) -> Option<BigRational> {
        self.params.bound()
    }

    /// Sums two reports over the same parameters. Associative.
    pub fn merge(mut self, other: TrialReport) -> Result<TrialReport, OracleError> {
        if self.params != other.params {
            return Err(OracleError::MergeMismatch);
        }
        if other.trials == 0 {
            return Ok(self);
        }
        self.seeds = if self.trials == 0 {
            other.seeds
        } else {
            self.seeds.start.min(other.seeds.start)..self.seeds.end.max(other.seeds.end)
        };
        self.trials += other.trials;
        self.successes += other.successes;
        self.failed_seeds.extend(other.failed_seeds);
        self.failed_seeds.sort_unstable();
        Ok(self)
    }

    /// Whether the observed failure rate stays within `p + 3σ`, where `p`
    /// is the failure probability implied by the bound and `σ` the binomial
    /// standard deviation of the observed rate. Vacuous without a bound.
    pub fn within_bound(&self) -> bool {
        let Some(bound) = self.bound() else { return true };
        let p = (BigRational::one() - bound).to_f64().unwrap_or(1.0).clamp(0.0, 1.0);
        let trials = self.trials.max(1) as f64;
        let sigma = (p * (1.0 - p) / trials).sqrt();
        1.0 - self.rate_f64() <= p + 3.0 * sigma + 1e-12
    }

    pub fn to_json(&self) -> Value {
        json!({
            "campaign": self.params.campaign,
            "field": self.params.field,
            "n": self.params.n,
            "d_h": self.params.d_h,
            "d_prime": self.params.d_prime,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate().to_string(),
            "rate_f64": self.rate_f64(),
            "bound": self.bound().map(|b| b.to_string()),
            "bound_f64": self.bound().and_then(|b| b.to_f64()),
            "seeds": [self.seeds.start, self.seeds.end],
            "failed_seeds": self.failed_seeds,
        })
    }

    pub const TABLE_HEADER: &'static str = "campaign       field       n  d_h  d'   trials  successes    rate     bound  seeds";

    pub fn table_row(&self) -> String {
        let bound = self.bound().and_then(|b| b.to_f64()).map_or("-".to_string(), |b| format!("{b:.5}"));
        format!(
            "{:<14} {:<10} {:>2} {:>4} {:>3} {:>8} {:>10} {:>7.4} {:>9}  {}..{}",
            self.params.campaign.name(),
            self.params.field.to_string(),
            self.params.n,
            self.params.d_h,
            self.params.d_prime,
            self.trials,
            self.successes,
            self.rate_f64(),
            bound,
            self.seeds.start,
            self.seeds.end
        )
    }
}

/// Runs a single trial of the campaign.
pub fn run_trial(params: &CampaignParams, seed: u64) -> Result<bool, OracleError> {
    let (ctx, n) = (params.field, params.n);
    Ok(match params.campaign {
        Campaign::ConjectureY => conjecture_y_trial(n, ctx, seed),
        Campaign::PowerQuotient => power_quotient_trial(n, params.d_h, params.d_prime, ctx, seed, params.allow_violation)?,
        Campaign::VtildeEqualsVf => {
            let inst = gen_decomposable(&GenSpec::new(ctx, n).homogeneous(true).seed(seed)).expect("valid spec");
            build_vtilde(&inst.f) == brute_vf(&inst.h)
        }
        Campaign::Homogeneous => {
            let inst = gen_decomposable(&GenSpec::new(ctx, n).homogeneous(true).seed(seed)).expect("valid spec");
            decompose_homogeneous(&inst.f, &DecomposeOptions::with_seed(seed)).is_ok_and(|r| r.verified)
        }
        Campaign::Fdpmp4 => {
            let inst = gen_decomposable(&GenSpec::new(ctx, n).seed(seed)).expect("valid spec");
            fdpmp4(&inst.f, &DecomposeOptions::with_seed(seed)).is_ok_and(|r| r.verified)
        }
    })
}

/// Runs every seed in `seeds` in parallel and merges the chunk reports.
/// A panicking trial counts as a failure.
pub fn run_campaign(params: &CampaignParams, seeds: Range<u64>) -> Result<TrialReport, OracleError> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(OracleError::InvalidParams("need at least one trial".into()));
    }
    let len = seeds.end - seeds.start;
    let chunk = (len / (4 * rayon::current_num_threads() as u64)).max(1);
    let starts: Vec<u64> = (seeds.start..seeds.end).step_by(chunk as usize).collect();
    let parts: Vec<TrialReport> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(seeds.end);
            (start..end).fold(TrialReport::empty(*params, start), |acc, seed| {
                let ok = catch_unwind(AssertUnwindSafe(|| run_trial(params, seed))).unwrap_or_else(|_| {
                    log::error!("trial {seed} panicked");
                    Ok(false)
                });
                acc.merge(TrialReport::single(*params, seed, ok.unwrap_or(false))).expect("same params")
            })
        })
        .collect();
    parts.into_iter().try_fold(TrialReport::empty(*params, seeds.start), TrialReport::merge)
}
