//! Cancellation pairs: two classes at level `μ′` whose cube-sum parts differ
//! exactly by the phase `e((−1)^s hθ)`.
//!
//! Every coordinate is laid out in three sections separated by zero gaps:
//!
//! ```text
//! index:  μ′ … μ′−d | gap | middle blocks | 2r+1 zeros | μ … 0
//!         prefix δ′_i                                    suffix n_i
//! ```
//!
//! In the middle, coordinates `1..s−1` carry staggered copies of the block
//! `(a_1, …, a_{d−1}, a_d − 1)` and coordinate `s` a single 1, so that
//! together they add up to one digit 1 at index `P`. Coordinate 0 carries the
//! same block ending at `P` in the second vector, which then completes to a
//! single digit at `P + d`, and one index higher in the first vector, where
//! nothing merges. Only the vertex using every coordinate sees the
//! difference, and there the digit sums differ by exactly `h`.

use num_complex::Complex64;

use crate::carrylab::check_carry_separation;
use crate::cubesum::{check_dimension, CubeConfig, Frequency};
use crate::numsys::{Digit, NumerationSystem};
use crate::report::{Num, Report};

use super::counts::WindowPattern;
use super::{class_coords, class_sum_over, join, normalizer, ClassSumQuery, ProofError};

/// Optional overrides of the block layout.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairLayout {
    /// Zeros between the suffix and the middle; default `2r + 1`.
    pub low_gap: Option<usize>,
    /// `μ′ − μ`; default and minimum `3r + (s+2)d + 1`.
    pub span: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAssembly {
    pub s: usize,
    pub mu: usize,
    pub mu_prime: usize,
    pub r: usize,
    pub h: u64,
    pub suffix: Vec<u64>,
    pub prefix: Vec<WindowPattern>,
    /// Lowest and highest index used by middle blocks.
    pub middle: (usize, usize),
    /// Middle-section values per coordinate, for each vector.
    pub middle_first: Vec<u64>,
    pub middle_second: Vec<u64>,
    /// `n^{(1)}` and `n^{(2)}`; they differ only in coordinate 0.
    pub first: Vec<u64>,
    pub second: Vec<u64>,
}

impl BlockAssembly {
    pub fn report(&self) -> Report {
        Report::new()
            .with("s", self.s)
            .with("mu", self.mu)
            .with("mu_prime", self.mu_prime)
            .with("r", self.r)
            .with("h", self.h)
            .with("middle", format!("{},{}", self.middle.0, self.middle.1))
            .with("first", join(&self.first))
            .with("second", join(&self.second))
    }
}

/// Writes `(a_1, …, a_{d−1}, a_d − 1)` with its top digit at `top`.
fn write_block(sys: &NumerationSystem, digits: &mut [Digit], top: usize) {
    let a = sys.coeffs();
    let d = a.len();
    for (j, &c) in a.iter().enumerate() {
        digits[top - j] += if j + 1 == d { c - 1 } else { c };
    }
}

fn first_bad_window(sys: &NumerationSystem, digits: &[Digit]) -> Option<usize> {
    (0..digits.len()).rev().find(|&j| !sys.window_ok(digits, j))
}

/// Builds the pair for low parts `n` (each below `G_{μ+1}`) and top windows
/// `δ′`, with carry radius `r`.
pub fn build_cancellation_pair(
    sys: &NumerationSystem,
    s: usize,
    mu: usize,
    r: usize,
    n: &[u64],
    prefix: &[WindowPattern],
    layout: PairLayout,
) -> Result<BlockAssembly, ProofError> {
    check_dimension(s)?;
    let d = sys.degree();
    if n.len() != s + 1 || prefix.len() != s + 1 {
        return Err(ProofError::Precondition(format!("need {} low parts and windows", s + 1)));
    }
    if let Some(&bad) = n.iter().find(|&&x| x >= sys.g(mu + 1)) {
        return Err(ProofError::Precondition(format!("low part {bad} is not below G_{}", mu + 1)));
    }
    if let Some(p) = prefix.iter().find(|p| !p.is_admissible(sys)) {
        return Err(ProofError::Precondition(format!("window {p} is not admissible")));
    }
    let min_span = 3 * r + (s + 2) * d + 1;
    let span = layout.span.unwrap_or(min_span);
    if span < min_span {
        return Err(ProofError::Precondition(format!("span {span} is below 3r + (s+2)d + 1 = {min_span}")));
    }
    let mu_prime = mu + span;
    let low_gap = layout.low_gap.unwrap_or(2 * r + 1);
    let base = mu + low_gap + 1;
    let p = base + (s - 1) * d;
    let top = p + d;
    if top + d >= mu_prime {
        return Err(ProofError::ConstructionFailed {
            reason: format!("middle section reaches index {top}, too close to the window at {mu_prime}"),
            window: None,
        });
    }

    let mut shared = vec![vec![0 as Digit; mu_prime + 1]; s + 1];
    for i in 0..=s {
        let low = sys.digits_u64(n[i]);
        shared[i][..low.len()].copy_from_slice(&low);
        for (j, &digit) in prefix[i].digits.iter().enumerate() {
            shared[i][mu_prime - j] = digit;
        }
    }
    let mut middle = vec![vec![0 as Digit; mu_prime + 1]; s + 1];
    for (i, row) in middle.iter_mut().enumerate().take(s).skip(1) {
        write_block(sys, row, p - (i - 1) * d - 1);
    }
    middle[s][base] += 1;
    let mut middle_second = middle.clone();
    write_block(sys, &mut middle[0], p + d);
    write_block(sys, &mut middle_second[0], p + d - 1);

    let assemble = |mid: &[Vec<Digit>]| -> Result<(Vec<u64>, Vec<u64>), ProofError> {
        let mut values = Vec::new();
        let mut mids = Vec::new();
        for i in 0..=s {
            let digits: Vec<Digit> = shared[i].iter().zip(&mid[i]).map(|(a, b)| a + b).collect();
            if let Some(w) = first_bad_window(sys, &digits) {
                return Err(ProofError::ConstructionFailed {
                    reason: format!("coordinate {i} is not admissible"),
                    window: Some(w),
                });
            }
            values.push(sys.value_u64(&digits).unwrap());
            mids.push(sys.value_u64(&mid[i]).unwrap());
        }
        Ok((values, mids))
    };
    let (first, middle_first) = assemble(&middle)?;
    let (second, middle_second) = assemble(&middle_second)?;
    Ok(BlockAssembly {
        s,
        mu,
        mu_prime,
        r,
        h: sys.savings_constant(),
        suffix: n.to_vec(),
        prefix: prefix.to_vec(),
        middle: (base, top),
        middle_first,
        middle_second,
        first,
        second,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    /// Both vectors are canonical expansions.
    pub admissible: bool,
    /// Both vectors lie in `M(μ, μ′, n, δ′)`.
    pub membership: bool,
    /// The carry-separation identity holds for both at `k = μ + 1`.
    pub separation: bool,
    pub check_a: bool,
    /// `(ε, s(first vertex), s(second vertex))` for the first vertex that
    /// differs.
    pub witness_a: Option<(usize, u64, u64)>,
    pub check_b: bool,
    /// `s(first) − s(second)` at the full vertex.
    pub difference_b: i64,
    pub check_c: bool,
    pub deviation_c: f64,
    /// Trivial bound of either class sum, against which the deviation is
    /// measured.
    pub scale_c: f64,
}

/// Relative tolerance for the phase relation.
pub const PHASE_TOLERANCE: f64 = 1e-9;

impl PairVerdict {
    pub fn passed(&self) -> bool {
        self.admissible && self.membership && self.separation && self.check_a && self.check_b && self.check_c
    }

    pub fn report(&self) -> Report {
        let witness = self
            .witness_a
            .map(|(e, a, b)| format!("{e},{a},{b}"))
            .unwrap_or_default();
        Report::new()
            .with("admissible", self.admissible)
            .with("membership", self.membership)
            .with("separation", self.separation)
            .with("check_a", self.check_a)
            .with("witness_a", witness)
            .with("check_b", self.check_b)
            .with("difference_b", self.difference_b)
            .with("check_c", self.check_c)
            .with("deviation_c", Num(self.deviation_c))
            .with("scale_c", Num(self.scale_c))
            .with("passed", self.passed())
    }
}

fn vertex(xs: &[u64], eps: usize) -> u64 {
    xs[0] + (1..xs.len()).filter(|i| eps >> (i - 1) & 1 == 1).map(|i| xs[i]).sum::<u64>()
}

/// Runs the three checks on an assembly, with class sums at level `μ′`
/// truncated at `λ ≥ μ′`.
pub fn check_pair_identity(
    sys: &NumerationSystem,
    assembly: &BlockAssembly,
    theta: &Frequency,
    lambda: usize,
    config: &CubeConfig,
) -> Result<PairVerdict, ProofError> {
    let BlockAssembly { s, mu, mu_prime, r, h, .. } = *assembly;
    if lambda < mu_prime {
        return Err(ProofError::Precondition(format!("lambda = {lambda} is below mu_prime = {mu_prime}")));
    }
    let d = sys.degree();
    let pair = [&assembly.first, &assembly.second];

    let admissible = pair
        .iter()
        .all(|v| v.iter().all(|&x| sys.is_admissible(&sys.digits_u64(x))));
    let membership = pair.iter().all(|v| {
        v.iter().enumerate().all(|(i, &x)| {
            x < sys.g(mu_prime + 1)
                && sys.low_part_u64(x, mu) == assembly.suffix[i]
                && WindowPattern::at(&sys.digits_u64(x), mu_prime, d) == assembly.prefix[i]
        })
    });
    let separation = pair.iter().all(|v| {
        check_carry_separation(sys, v, mu + 1, r)
            .map(|rep| rep.holds)
            .unwrap_or(false)
    });

    let sod = |x: u64| sys.truncated_sum_u64(x, mu_prime, config.truncation);
    let full = (1usize << s) - 1;
    let witness_a = (0..full).find_map(|eps| {
        let (a, b) = (sod(vertex(&assembly.first, eps)), sod(vertex(&assembly.second, eps)));
        (a != b).then_some((eps, a, b))
    });
    let difference_b = sod(vertex(&assembly.first, full)) as i64 - sod(vertex(&assembly.second, full)) as i64;

    let class = |n: &Vec<u64>| -> Result<(Complex64, f64), ProofError> {
        let query = ClassSumQuery {
            system: sys,
            s,
            lambda,
            mu: mu_prime,
            theta: *theta,
            n: n.clone(),
        };
        let coords = class_coords(&query, config)?;
        let size: f64 = coords.iter().map(|c| c.len() as f64).product();
        let norm = normalizer(sys, lambda, s);
        let sum = class_sum_over(sys, lambda, theta, config, &coords, config.execution);
        Ok((sum / norm, size / norm))
    };
    let (s1, scale1) = class(&assembly.first)?;
    let (s2, scale2) = class(&assembly.second)?;
    let sign = if s % 2 == 0 { 1 } else { -1 };
    let deviation_c = (s1 - s2 * theta.phase(sign * h as i64)).norm();
    let scale_c = scale1.max(scale2);

    Ok(PairVerdict {
        admissible,
        membership,
        separation,
        check_a: witness_a.is_none(),
        witness_a,
        check_b: difference_b == h as i64,
        difference_b,
        check_c: deviation_c <= PHASE_TOLERANCE * scale_c,
        deviation_c,
        scale_c,
    })
}
