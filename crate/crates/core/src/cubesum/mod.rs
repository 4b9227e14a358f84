//! Gowers-type cube sums of the truncated digit sum.
//!
//! For a system `G`, dimension `s`, truncation index `λ` and frequency `θ`,
//!
//! ```text
//! G_λ^{-(s+1)} Σ_{n_0,…,n_s < G_λ} Π_{ε ∈ {0,1}^s} C^{|ε|} e(θ s_{G,λ}(n_0 + Σ ε_i n_i))
//! ```
//!
//! where `C` conjugates. Every term is `e(θE)` for the integer
//! `E = Σ_ε (−1)^{|ε|} s_{G,λ}(·)`, so both engines first count `E` exactly and
//! only then sum phases.

mod decay;
mod dp;
mod frequency;
mod histogram;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exec::Execution;
use crate::numsys::{NumerationSystem, Truncation};

pub use decay::{decay_scan, DecayRow, DecayTable, CSV_HEADER};
pub use dp::cube_sum_baseb_dp;
pub use frequency::{fractional_norm, Frequency, FrequencyParseError};
pub use histogram::{exponent_histogram, Histogram};

/// Default cap on `G_λ^{s+1} · 2^s`.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Largest supported cube dimension.
pub const MAX_DIMENSION: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("estimated cost {terms} exceeds the budget of {budget} terms")]
    BudgetExceeded { terms: BigUint, budget: u64 },
    #[error("cube dimension {s} is outside 1..=3")]
    BadDimension { s: usize },
    #[error("base {b} cannot hold s + 1 = {} summands below b^(k+2)", .s + 1)]
    UnsupportedShape { b: u32, s: usize },
    #[error("the DP engine needs an integer base")]
    NotIntegerBase,
    #[error("savings constant is zero")]
    DegenerateH,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeConfig {
    pub budget: u64,
    pub truncation: Truncation,
    pub execution: Execution,
}

impl Default for CubeConfig {
    fn default() -> Self {
        CubeConfig {
            budget: DEFAULT_BUDGET,
            truncation: Truncation::Inclusive,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    Naive,
    Dp,
    /// The DP when the system is an integer base and the shape fits, else naive.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct CubeQuery<'a> {
    pub system: &'a NumerationSystem,
    pub s: usize,
    pub lambda: usize,
    pub theta: Frequency,
}

impl<'a> CubeQuery<'a> {
    pub fn new(system: &'a NumerationSystem, s: usize, lambda: usize, theta: Frequency) -> Self {
        CubeQuery {
            system,
            s,
            lambda,
            theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubeValue {
    pub value: Complex64,
    pub modulus: f64,
    /// `G_λ^{s+1}`, the number of summands and the normalizer.
    pub term_count: BigUint,
}

impl CubeValue {
    fn new(value: Complex64, term_count: BigUint) -> Self {
        CubeValue {
            value,
            modulus: value.norm(),
            term_count,
        }
    }
}

/// `h = (a_1 − 1) + a_2 + ⋯ + a_d`, the digit-sum gap of a cancellation pair.
pub fn savings_constant(sys: &NumerationSystem) -> Result<u64, CubeError> {
    match sys.savings_constant() {
        0 => Err(CubeError::DegenerateH),
        h => Ok(h),
    }
}

pub(crate) fn check_dimension(s: usize) -> Result<(), CubeError> {
    if (1..=MAX_DIMENSION).contains(&s) {
        Ok(())
    } else {
        Err(CubeError::BadDimension { s })
    }
}

/// `side^{s+1} · 2^s` against the budget.
pub(crate) fn check_budget(side: &BigUint, s: usize, budget: u64) -> Result<(), CubeError> {
    let terms = side.pow(s as u32 + 1) << s;
    if terms > BigUint::from(budget) {
        return Err(CubeError::BudgetExceeded { terms, budget });
    }
    Ok(())
}

/// `t[y] = s_{G,λ}(y)` for `y < len`.
pub(crate) fn truncated_table(sys: &NumerationSystem, lambda: usize, truncation: Truncation, len: u64) -> Vec<u64> {
    (0..len)
        .map(|y| sys.truncated_sum_u64(y, lambda, truncation))
        .collect()
}

pub(crate) fn normalize(sum: Complex64, term_count: &BigUint) -> Complex64 {
    sum / term_count.to_f64().unwrap()
}

/// Direct enumeration of all `G_λ^{s+1}` tuples.
pub fn cube_sum_naive(query: &CubeQuery<'_>, config: &CubeConfig) -> Result<CubeValue, CubeError> {
    let CubeQuery { system, s, lambda, theta } = *query;
    check_dimension(s)?;
    let side = system.term(lambda);
    check_budget(&side, s, config.budget)?;
    let g = side.to_u64().unwrap();
    let table = truncated_table(system, lambda, config.truncation, (s as u64 + 1) * (g - 1) + 1);
    let coords: Vec<Vec<u64>> = vec![(0..g).collect(); s + 1];
    let t_max = table.iter().copied().max().unwrap_or(0);
    let hist = exponent_histogram(|y| table[y as usize], t_max, &coords, config.execution);
    let term_count = side.pow(s as u32 + 1);
    Ok(CubeValue::new(normalize(hist.phase_sum(&theta), &term_count), term_count))
}

/// Dispatches to an engine. `Auto` answers integer frequencies without
/// enumerating, since every summand is then exactly 1.
pub fn cube_sum(query: &CubeQuery<'_>, engine: Engine, config: &CubeConfig) -> Result<CubeValue, CubeError> {
    let base = query.system.integer_base();
    if engine == Engine::Auto && query.theta.is_integer() {
        check_dimension(query.s)?;
        let term_count = query.system.term(query.lambda).pow(query.s as u32 + 1);
        return Ok(CubeValue::new(Complex64::new(1.0, 0.0), term_count));
    }
    match (engine, base) {
        (Engine::Naive, _) | (Engine::Auto, None) => cube_sum_naive(query, config),
        (Engine::Dp, Some(b)) => cube_sum_baseb_dp(b, query.s, query.lambda, &query.theta, config.truncation),
        (Engine::Dp, None) => Err(CubeError::NotIntegerBase),
        (Engine::Auto, Some(b)) => match cube_sum_baseb_dp(b, query.s, query.lambda, &query.theta, config.truncation) {
            Err(CubeError::UnsupportedShape { .. }) => cube_sum_naive(query, config),
            other => other,
        },
    }
}
