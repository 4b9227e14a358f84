//! Class counts `N(μ, μ′, n, δ′)`: how many coordinate vectors below
//! `G_{μ′+1}` have low parts `n` at level `μ` and top window `δ′` at `μ′`.
//!
//! Counts factor over coordinates, so tables are kept per coordinate and
//! multiplied on lookup.

use std::collections::HashMap;
use std::fmt;

use crate::numsys::{Digit, NumerationSystem};
use crate::report::{Num, Report};

use super::{join, tuples, ProofError};

/// Digits `(δ_t, δ_{t−1}, …, δ_{t−d})` of a number around index `t`, highest
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowPattern {
    pub digits: Vec<Digit>,
}

impl WindowPattern {
    /// The window of `digits` (little-endian) whose top index is `top`.
    pub fn at(digits: &[Digit], top: usize, degree: usize) -> Self {
        let digits = (0..=degree)
            .map(|j| match top.checked_sub(j) {
                Some(i) => digits.get(i).copied().unwrap_or(0),
                None => 0,
            })
            .collect();
        WindowPattern { digits }
    }

    /// Both length-`d` sub-windows lie strictly below `(a_1, …, a_d)`.
    pub fn is_admissible(&self, sys: &NumerationSystem) -> bool {
        let d = sys.degree();
        self.digits.len() == d + 1 && self.digits[..d] < *sys.coeffs() && self.digits[1..] < *sys.coeffs()
    }

    /// The smallest integer whose window at `top` is this pattern: the pattern
    /// digits with zeros below. `None` if a nonzero digit would fall below
    /// index 0.
    pub fn representative(&self, sys: &NumerationSystem, top: usize) -> Option<u64> {
        let mut value = 0;
        for (j, &digit) in self.digits.iter().enumerate() {
            if digit == 0 {
                continue;
            }
            value += digit as u64 * sys.g(top.checked_sub(j)?);
        }
        Some(value)
    }
}

impl fmt::Display for WindowPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.digits))
    }
}

/// The set `S` of admissible top windows of length `d + 1`.
pub fn admissible_patterns(sys: &NumerationSystem) -> Vec<WindowPattern> {
    let d = sys.degree();
    let side = sys.max_digit() as u64 + 1;
    tuples(side, d + 1)
        .into_iter()
        .map(|t| WindowPattern {
            digits: t.into_iter().map(|x| x as Digit).collect(),
        })
        .filter(|p| p.is_admissible(sys))
        .collect()
}

/// Per-coordinate counts for one pair of levels.
#[derive(Debug, Clone)]
pub struct ClassCountTable {
    pub mu: usize,
    pub mu_prime: usize,
    entries: HashMap<(u64, WindowPattern), u64>,
}

impl ClassCountTable {
    /// Enumerates every `x < G_{μ′+1}`.
    pub fn build(sys: &NumerationSystem, mu: usize, mu_prime: usize) -> Self {
        assert!(mu <= mu_prime, "levels out of order");
        let d = sys.degree();
        let mut entries = HashMap::new();
        for x in 0..sys.g(mu_prime + 1) {
            let digits = sys.digits_u64(x);
            let low = sys.value_u64(&digits[..digits.len().min(mu + 1)]).unwrap();
            *entries.entry((low, WindowPattern::at(&digits, mu_prime, d))).or_insert(0) += 1;
        }
        ClassCountTable { mu, mu_prime, entries }
    }

    /// One coordinate.
    pub fn coordinate(&self, n: u64, pattern: &WindowPattern) -> u64 {
        // a lookup without cloning the key would need a borrowed form of the tuple
        self.entries.get(&(n, pattern.clone())).copied().unwrap_or(0)
    }

    /// `N(μ, μ′, n, δ′)`.
    pub fn count(&self, n: &[u64], patterns: &[WindowPattern]) -> u64 {
        assert_eq!(n.len(), patterns.len());
        n.iter().zip(patterns).map(|(&x, p)| self.coordinate(x, p)).product()
    }

    /// Largest single-coordinate count.
    pub fn max_coordinate(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    /// Number of `x < G_{μ′+1}` with `v(x, μ) = n`, summed over windows.
    pub fn class_size(&self, n: u64) -> u64 {
        self.entries.iter().filter(|((low, _), _)| *low == n).map(|(_, &c)| c).sum()
    }
}

/// `N(μ, μ′, n, δ′)` by enumeration.
pub fn count_class(
    sys: &NumerationSystem,
    mu: usize,
    mu_prime: usize,
    n: &[u64],
    patterns: &[WindowPattern],
) -> Result<u64, ProofError> {
    if mu > mu_prime {
        return Err(ProofError::Precondition(format!("mu = {mu} exceeds mu_prime = {mu_prime}")));
    }
    if n.len() != patterns.len() {
        return Err(ProofError::Precondition("one pattern per coordinate is required".into()));
    }
    Ok(ClassCountTable::build(sys, mu, mu_prime).count(n, patterns))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionReport {
    pub k: usize,
    pub span: usize,
    pub identities: usize,
    /// `(n, δ″, left side, right side)` for every failure.
    pub mismatches: Vec<(Vec<u64>, Vec<WindowPattern>, u64, u64)>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new()
            .with("k", self.k)
            .with("span", self.span)
            .with("identities", self.identities)
            .with("mismatches", self.mismatches.len())
            .with("passed", self.passed());
        if let Some((n, p, l, rr)) = self.mismatches.first() {
            r.push("first_mismatch_class", join(n));
            r.push("first_mismatch_window", join(p));
            r.push("first_mismatch_sides", format!("{l},{rr}"));
        }
        r
    }
}

/// Checks, for every class `n` at level `k` and every `δ″ ∈ S^{s+1}`,
///
/// ```text
/// Σ_{δ′ ∈ S^{s+1}} N(k, k+L, n, δ′) · N(k+L, k+2L, δ′, δ″) = N(k, k+2L, n, δ″)
/// ```
///
/// where a window `δ′` stands for the class of its representative at level
/// `k + L`. Requires `L > d`, so that the middle window clears the fixed low
/// digits.
pub fn check_composition(sys: &NumerationSystem, s: usize, k: usize, span: usize) -> Result<CompositionReport, ProofError> {
    crate::cubesum::check_dimension(s)?;
    let d = sys.degree();
    if span <= d {
        return Err(ProofError::Precondition(format!("span {span} must exceed the degree {d}")));
    }
    let mid = k + span;
    let top = k + 2 * span;
    let lower = ClassCountTable::build(sys, k, mid);
    let upper = ClassCountTable::build(sys, mid, top);
    let whole = ClassCountTable::build(sys, k, top);
    let patterns = admissible_patterns(sys);
    let reps: Vec<Option<u64>> = patterns.iter().map(|p| p.representative(sys, mid)).collect();

    let mut identities = 0;
    let mut mismatches = Vec::new();
    let pattern_tuples = tuples(patterns.len() as u64, s + 1);
    for n in tuples(sys.g(k + 1), s + 1) {
        for outer in &pattern_tuples {
            let outer: Vec<WindowPattern> = outer.iter().map(|&i| patterns[i as usize].clone()).collect();
            let mut lhs = 0u64;
            for inner in &pattern_tuples {
                let mut term = 1u64;
                for i in 0..=s {
                    let j = inner[i] as usize;
                    let step = match reps[j] {
                        Some(y) => lower.coordinate(n[i], &patterns[j]) * upper.coordinate(y, &outer[i]),
                        None => 0,
                    };
                    term *= step;
                    if term == 0 {
                        break;
                    }
                }
                lhs += term;
            }
            let rhs = whole.count(&n, &outer);
            identities += 1;
            if lhs != rhs {
                mismatches.push((n.clone(), outer, lhs, rhs));
            }
        }
    }
    Ok(CompositionReport {
        k,
        span,
        identities,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub span: usize,
    /// `max N(μ, μ+span, n, δ′)` over classes and windows.
    pub max_count: u64,
    /// `max N^{1/(s+1)} / β^{span}`.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub beta: f64,
    pub rows: Vec<GrowthRow>,
    /// Running maximum of `c` over the spans.
    pub c_max: f64,
    /// Least-squares slope of `ln c` against the span.
    pub trend: Option<f64>,
}

/// Largest tolerated slope of `ln c` per unit of span.
pub const GROWTH_TREND_TOLERANCE: f64 = 0.05;

impl GrowthReport {
    /// No upward drift of `c` across the spans.
    pub fn bounded(&self) -> bool {
        self.trend.is_none_or(|t| t <= GROWTH_TREND_TOLERANCE)
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new().with("beta", Num(self.beta));
        for row in &self.rows {
            r.push(format!("span_{}", row.span), format!("{},{}", row.max_count, Num(row.c)));
        }
        r.with("c_max", Num(self.c_max))
            .with("trend", self.trend.map(|t| Num(t).to_string()).unwrap_or_default())
            .with("bounded", self.bounded())
    }
}

/// Empirical constant in `N < c^{s+1} β^{(μ′−μ)(s+1)}` per span.
///
/// Counts are products of per-coordinate counts, so the maximum over vectors
/// is the per-coordinate maximum to the power `s + 1`.
pub fn verify_growth_bound(
    sys: &NumerationSystem,
    s: usize,
    mu: usize,
    spans: &[usize],
) -> Result<GrowthReport, ProofError> {
    crate::cubesum::check_dimension(s)?;
    let beta = sys
        .dominant_root(crate::numsys::DEFAULT_ROOT_TOLERANCE)
        .map_err(|e| ProofError::Precondition(e.to_string()))?
        .beta;
    let mut rows = Vec::new();
    for &span in spans {
        let per = ClassCountTable::build(sys, mu, mu + span).max_coordinate();
        rows.push(GrowthRow {
            span,
            max_count: per.pow(s as u32 + 1),
            c: per as f64 / beta.powi(span as i32),
        });
    }
    let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max);
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.c > 0.0).map(|r| (r.span as f64, r.c.ln())).collect();
    Ok(GrowthReport {
        beta,
        rows,
        c_max,
        trend: slope(&points),
    })
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: filter every `x` below the level bound.
    fn count_oracle(sys: &NumerationSystem, mu: usize, mu_prime: usize, n: u64, p: &WindowPattern) -> u64 {
        (0..sys.g(mu_prime + 1))
            .filter(|&x| {
                sys.low_part_u64(x, mu) == n && WindowPattern::at(&sys.digits_u64(x), mu_prime, sys.degree()) == *p
            })
            .count() as u64
    }

    fn pat(digits: &[Digit]) -> WindowPattern {
        WindowPattern { digits: digits.to_vec() }
    }

    #[test]
    fn zeckendorf_patterns() {
        let z = NumerationSystem::zeckendorf();
        let s: Vec<String> = admissible_patterns(&z).iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["0,0,0", "0,0,1", "0,1,0", "1,0,0", "1,0,1"]);
        assert_eq!(admissible_patterns(&NumerationSystem::base(3).unwrap()).len(), 9);
    }

    #[test]
    fn counts_match_oracle() {
        for coeffs in [&[1u32, 1][..], &[2, 1], &[1, 1, 1]] {
            let sys = NumerationSystem::new(coeffs, None).unwrap();
            let table = ClassCountTable::build(&sys, 1, 5);
            for n in 0..sys.g(2) {
                let mut total = 0;
                for p in admissible_patterns(&sys) {
                    let c = table.coordinate(n, &p);
                    assert_eq!(c, count_oracle(&sys, 1, 5, n, &p), "{coeffs:?} n={n} p={p}");
                    total += c;
                }
                // windows partition the class
                let size = (0..sys.g(6)).filter(|&x| sys.low_part_u64(x, 1) == n).count() as u64;
                assert_eq!(total, size);
                assert_eq!(table.class_size(n), size);
            }
        }
    }

    #[test]
    fn induction_base() {
        let z = NumerationSystem::zeckendorf();
        for k in 0..5 {
            for n in 0..z.g(k + 1) {
                for p in admissible_patterns(&z) {
                    let expected = (WindowPattern::at(&z.digits_u64(n), k, 2) == p) as u64;
                    assert_eq!(count_class(&z, k, k, &[n], &[p]).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn unreachable_window_counts_zero() {
        // n = 2 has digit 1 at index 1, so a window with δ_1 = 1 below an index-2 one cannot occur
        let z = NumerationSystem::zeckendorf();
        assert_eq!(count_class(&z, 1, 2, &[2], &[pat(&[1, 1, 0])]).unwrap(), 0);
        assert_eq!(count_class(&z, 1, 2, &[2], &[pat(&[0, 1, 0])]).unwrap(), 1);
    }

    #[test]
    fn composition_holds() {
        let z = NumerationSystem::zeckendorf();
        let r = check_composition(&z, 1, 1, 3).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches.first());
        assert_eq!(r.identities, 9 * 25);
        for coeffs in [&[2u32, 1][..], &[1, 1, 1], &[2]] {
            let sys = NumerationSystem::new(coeffs, None).unwrap();
            let r = check_composition(&sys, 1, 0, sys.degree() + 1).unwrap();
            assert!(r.passed(), "{coeffs:?}");
        }
        assert!(check_composition(&z, 1, 1, 2).is_err());
    }

    #[test]
    fn integer_base_counts_have_closed_form() {
        let b = 3u64;
        let sys = NumerationSystem::base(b as u32).unwrap();
        let mu = 1;
        for span in 0..5 {
            let table = ClassCountTable::build(&sys, mu, mu + span);
            for n in 0..sys.g(mu + 1) {
                for p in admissible_patterns(&sys) {
                    // digits strictly between the window and the low part are free
                    let free = span.saturating_sub(2) as u32;
                    let nd = sys.digits_u64(n);
                    let consistent = (0..2).all(|j| {
                        let idx = (mu + span) as isize - j as isize;
                        idx > mu as isize
                            || p.digits[j] == if idx < 0 { 0 } else { nd.get(idx as usize).copied().unwrap_or(0) }
                    });
                    let expected = if consistent { b.pow(free) } else { 0 };
                    assert_eq!(table.coordinate(n, &p), expected, "span={span} n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn growth_is_flat() {
        let z = NumerationSystem::zeckendorf();
        let r = verify_growth_bound(&z, 1, 1, &[2, 3, 4, 5, 6]).unwrap();
        assert!(r.bounded(), "{r:?}");
        let b2 = NumerationSystem::base(2).unwrap();
        let r = verify_growth_bound(&b2, 2, 1, &[2, 3, 4, 5, 6]).unwrap();
        for row in &r.rows {
            assert_eq!(row.c, 0.25);
        }
        let r = verify_growth_bound(&z, 1, 2, &[0]).unwrap();
        assert_eq!(r.rows[0].max_count, 1);
        assert_eq!(r.rows[0].c, 1.0);
    }
}
