//! Desk-scale checks of the block-refinement argument behind the decay of
//! the cube sums.
//!
//! A class at level `μ` fixes the low digits `v(x_i, μ) = n_i` of every
//! coordinate; [`class_sum`] is the part of the cube sum coming from one class.
//! Classes at a finer level `μ′` partition coarser ones ([`check_refinement`]),
//! the number of completions of a class with a given top window grows like
//! `β^{μ′−μ}` ([`counts`]), and two carefully assembled classes differ only by
//! the phase `e(±hθ)` ([`pair`]).

pub mod counts;
pub mod pair;


use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::carrylab::enumerate_high_multiples;
use crate::cubesum::{check_dimension, exponent_histogram, CubeConfig, CubeError, Frequency};
use crate::exec::{self, Execution};
use crate::numsys::NumerationSystem;
use crate::report::{Num, Report};

pub use counts::{
    admissible_patterns, check_composition, count_class, verify_growth_bound, ClassCountTable, CompositionReport,
    GrowthReport, GrowthRow, WindowPattern,
};
pub use pair::{build_cancellation_pair, check_pair_identity, BlockAssembly, PairLayout, PairVerdict};


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction failed: {reason}")]
    ConstructionFailed {
        reason: String,
        /// Top index of the first window that is not admissible.
        window: Option<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct ClassSumQuery<'a> {
    pub system: &'a NumerationSystem,
    pub s: usize,
    pub lambda: usize,
    pub mu: usize,
    pub theta: Frequency,
    /// Low parts `n_0, …, n_s`, each below `G_{μ+1}`.
    pub n: Vec<u64>,
}

/// `{x < bound : v(x, μ) = n}`, increasing.
pub fn class_members(sys: &NumerationSystem, n: u64, mu: usize, bound: u64) -> Vec<u64> {
    if n >= bound {
        return Vec::new();
    }
    enumerate_high_multiples(sys, mu, bound - n)
        .into_iter()
        .map(|h| h + n)
        .filter(|&x| sys.low_part_u64(x, mu) == n)
        .collect()
}

fn class_sum_over(
    sys: &NumerationSystem,
    lambda: usize,
    theta: &Frequency,
    config: &CubeConfig,
    coords: &[Vec<u64>],
    exec: Execution,
) -> Complex64 {
    if coords.iter().any(|c| c.is_empty()) {
        return Complex64::new(0.0, 0.0);
    }
    let t_max = sys.max_digit() as u64 * config.truncation.kept(lambda) as u64;
    let trunc = config.truncation;
    let hist = exponent_histogram(|y| sys.truncated_sum_u64(y, lambda, trunc), t_max, coords, exec);
    hist.phase_sum(theta)
}

fn normalizer(sys: &NumerationSystem, lambda: usize, s: usize) -> f64 {
    sys.term(lambda).pow(s as u32 + 1).to_f64().unwrap()
}

/// Member lists of one class, with the term budget checked against the
/// actual class sizes.
fn class_coords(query: &ClassSumQuery<'_>, config: &CubeConfig) -> Result<Vec<Vec<u64>>, ProofError> {
    let ClassSumQuery { system, s, lambda, mu, ref n, .. } = *query;
    check_dimension(s)?;
    if n.len() != s + 1 {
        return Err(ProofError::Precondition(format!("expected {} low parts, got {}", s + 1, n.len())));
    }
    if mu > lambda {
        return Err(ProofError::Precondition(format!("mu = {mu} exceeds lambda = {lambda}")));
    }
    let cap = system.g(mu + 1);
    if let Some(&bad) = n.iter().find(|&&x| x >= cap) {
        return Err(ProofError::Precondition(format!("low part {bad} is not below G_{} = {cap}", mu + 1)));
    }
    let bound = system.g(lambda);
    let coords: Vec<Vec<u64>> = n.iter().map(|&x| class_members(system, x, mu, bound)).collect();
    let terms = coords.iter().map(|c| BigUint::from(c.len())).product::<BigUint>() << s;
    if terms > BigUint::from(config.budget) {
        return Err(CubeError::BudgetExceeded {
            terms,
            budget: config.budget,
        }
        .into());
    }
    Ok(coords)
}

/// `S_μ(n)`: the cube-sum terms with `v(x_i, μ) = n_i` for all `i`, still
/// normalized by `G_λ^{s+1}`.
pub fn class_sum(query: &ClassSumQuery<'_>, config: &CubeConfig) -> Result<Complex64, ProofError> {
    let coords = class_coords(query, config)?;
    let sum = class_sum_over(query.system, query.lambda, &query.theta, config, &coords, config.execution);
    Ok(sum / normalizer(query.system, query.lambda, query.s))
}

/// All tuples in `[0, side)^{len}`, first coordinate slowest.
pub(crate) fn tuples(side: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..side).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every class sum at level `μ`, keyed by the low-part tuple.
fn all_class_sums(
    sys: &NumerationSystem,
    s: usize,
    lambda: usize,
    theta: &Frequency,
    mu: usize,
    config: &CubeConfig,
) -> Vec<(Vec<u64>, Complex64)> {
    let bound = sys.g(lambda);
    let mut by_low: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for x in 0..bound {
        by_low.entry(sys.low_part_u64(x, mu)).or_default().push(x);
    }
    let classes = tuples(sys.g(mu + 1), s + 1);
    let norm = normalizer(sys, lambda, s);
    let sums = exec::map_collect(config.execution, &classes, |n| {
        let coords: Vec<Vec<u64>> = n.iter().map(|x| by_low.get(x).cloned().unwrap_or_default()).collect();
        class_sum_over(sys, lambda, theta, config, &coords, Execution::Sequential) / norm
    });
    classes.into_iter().zip(sums).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub mu: usize,
    pub mu_prime: usize,
    pub classes: usize,
    pub max_discrepancy: f64,
    /// Class attaining the maximum.
    pub worst_class: Vec<u64>,
}

/// Tolerance for the partition identity.
pub const REFINEMENT_TOLERANCE: f64 = 1e-12;

impl RefinementReport {
    pub fn passed(&self) -> bool {
        self.max_discrepancy <= REFINEMENT_TOLERANCE
    }

    pub fn report(&self) -> Report {
        Report::new()
            .with("mu", self.mu)
            .with("mu_prime", self.mu_prime)
            .with("classes", self.classes)
            .with("max_discrepancy", Num(self.max_discrepancy))
            .with("worst_class", join(&self.worst_class))
            .with("passed", self.passed())
    }
}

pub(crate) fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// `max_n |S_μ(n) − Σ_{v(n′, μ) = n} S_{μ′}(n′)|`.
pub fn check_refinement(
    sys: &NumerationSystem,
    s: usize,
    lambda: usize,
    theta: &Frequency,
    mu: usize,
    mu_prime: usize,
    config: &CubeConfig,
) -> Result<RefinementReport, ProofError> {
    check_dimension(s)?;
    if !(mu < mu_prime && mu_prime <= lambda) {
        return Err(ProofError::Precondition(format!(
            "need mu < mu_prime <= lambda, got {mu}, {mu_prime}, {lambda}"
        )));
    }
    let g = sys.term(lambda);
    crate::cubesum::check_budget(&g, s, config.budget)?;

    let coarse = all_class_sums(sys, s, lambda, theta, mu, config);
    let fine = all_class_sums(sys, s, lambda, theta, mu_prime, config);
    let mut grouped: BTreeMap<Vec<u64>, Complex64> = BTreeMap::new();
    for (n, v) in fine {
        let key: Vec<u64> = n.iter().map(|&x| sys.low_part_u64(x, mu)).collect();
        *grouped.entry(key).or_default() += v;
    }
    let mut worst = (0.0, Vec::new());
    for (n, v) in &coarse {
        let d = (v - grouped.get(n).copied().unwrap_or_default()).norm();
        if d > worst.0 || worst.1.is_empty() {
            worst = (d, n.clone());
        }
    }
    Ok(RefinementReport {
        mu,
        mu_prime,
        classes: coarse.len(),
        max_discrepancy: worst.0,
        worst_class: worst.1,
    })
}

/// `(|1 + e(hθ)|, 2 − 4‖hθ‖²)`; the first never exceeds the second.
pub fn cosine_savings(theta: f64, h: u64) -> (f64, f64) {
    let x = crate::cubesum::fractional_norm(theta * h as f64);
    let lhs = 2.0 * (std::f64::consts::PI * x).cos().abs();
    let rhs = 2.0 - 4.0 * x * x;
    assert!(lhs <= rhs + 1e-12, "savings inequality fails at hθ = {}", theta * h as f64);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubesum::{cube_sum_naive, CubeQuery};
    use crate::numsys::Truncation;

    /// Oracle: scan every tuple below `G_λ` and keep the ones in the class.
    fn class_oracle(sys: &NumerationSystem, s: usize, lambda: usize, mu: usize, theta: f64, n: &[u64]) -> Complex64 {
        let g = sys.g(lambda);
        let sod = |y: u64| sys.truncated_sum_u64(y, lambda, Truncation::Inclusive) as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for x in tuples(g, s + 1) {
            if x.iter().zip(n).any(|(&xi, &ni)| sys.low_part_u64(xi, mu) != ni) {
                continue;
            }
            let mut e = 0.0;
            for eps in 0..1usize << s {
                let arg = x[0] + (0..s).filter(|i| eps >> i & 1 == 1).map(|i| x[i + 1]).sum::<u64>();
                e += if eps.count_ones() % 2 == 0 { sod(arg) } else { -sod(arg) };
            }
            total += Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta * e);
        }
        total / (g as f64).powi(s as i32 + 1)
    }

    fn query(sys: &NumerationSystem, s: usize, lambda: usize, mu: usize, theta: Frequency, n: Vec<u64>) -> ClassSumQuery<'_> {
        ClassSumQuery {
            system: sys,
            s,
            lambda,
            mu,
            theta,
            n,
        }
    }

    #[test]
    fn class_sum_matches_oracle() {
        let z = NumerationSystem::zeckendorf();
        let config = CubeConfig::default();
        for n in [vec![0, 0], vec![1, 0], vec![2, 1]] {
            let v = class_sum(&query(&z, 1, 5, 1, Frequency::ratio(1, 2), n.clone()), &config).unwrap();
            assert!((v - class_oracle(&z, 1, 5, 1, 0.5, &n)).norm() < 1e-13, "{n:?}");
        }
        let t = NumerationSystem::tribonacci();
        let n = vec![1, 0, 3];
        let v = class_sum(&query(&t, 2, 5, 2, Frequency::Real(0.3), n.clone()), &config).unwrap();
        assert!((v - class_oracle(&t, 2, 5, 2, 0.3, &n)).norm() < 1e-13);
    }

    #[test]
    fn top_level_classes_are_single_terms() {
        let z = NumerationSystem::zeckendorf();
        let lambda = 5;
        let n = vec![7, 12];
        let v = class_sum(&query(&z, 1, lambda, lambda, Frequency::Real(0.3), n), &CubeConfig::default()).unwrap();
        assert!((v.norm() - 1.0 / 169.0).abs() < 1e-15);
    }

    #[test]
    fn classes_sum_to_cube_sum() {
        let sys = NumerationSystem::new(&[2, 1], None).unwrap();
        let config = CubeConfig::default();
        let theta = Frequency::Real(0.23);
        let total: Complex64 = tuples(sys.g(2), 2)
            .into_iter()
            .map(|n| class_sum(&query(&sys, 1, 4, 1, theta, n), &config).unwrap())
            .sum();
        let whole = cube_sum_naive(&CubeQuery::new(&sys, 1, 4, theta), &config).unwrap();
        assert!((total - whole.value).norm() < 1e-13);
    }

    #[test]
    fn class_members_match_scan() {
        let sys = NumerationSystem::new(&[3, 2, 1], None).unwrap();
        for mu in 0..4 {
            for n in 0..sys.g(mu + 1) {
                let scan: Vec<u64> = (0..sys.g(7)).filter(|&x| sys.low_part_u64(x, mu) == n).collect();
                assert_eq!(class_members(&sys, n, mu, sys.g(7)), scan);
            }
        }
    }

    #[test]
    fn refinement_examples() {
        let config = CubeConfig::default();
        let z = NumerationSystem::zeckendorf();
        let r = check_refinement(&z, 1, 7, &Frequency::Real(0.5), 2, 4, &config).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.classes, 25);
        let b2 = NumerationSystem::base(2).unwrap();
        let r = check_refinement(&b2, 1, 5, &Frequency::Real(0.3), 1, 3, &config).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(matches!(
            check_refinement(&z, 1, 7, &Frequency::Real(0.5), 3, 3, &config),
            Err(ProofError::Precondition(_))
        ));
    }

    #[test]
    fn bad_class_queries() {
        let z = NumerationSystem::zeckendorf();
        let config = CubeConfig::default();
        assert!(matches!(
            class_sum(&query(&z, 1, 5, 1, Frequency::zero(), vec![3, 0]), &config),
            Err(ProofError::Precondition(_))
        ));
        assert!(matches!(
            class_sum(&query(&z, 1, 5, 1, Frequency::zero(), vec![0]), &config),
            Err(ProofError::Precondition(_))
        ));
    }

    #[test]
    fn savings_examples() {
        assert_eq!(cosine_savings(0.5, 1).1, 1.0);
        assert!(cosine_savings(0.5, 1).0 < 1e-15);
        assert_eq!(cosine_savings(0.5, 2), (2.0, 2.0));
        let (a, b) = cosine_savings(1.0 / 3.0, 1);
        assert!((a - 1.0).abs() < 1e-12 && (b - (2.0 - 4.0 / 9.0)).abs() < 1e-12);
    }
}
