//! Empirical carry behaviour.
//!
//! Property F is a statement about finite β-expansions; its integer-side
//! consequence is that adding or subtracting two integers whose digits
//! `0..=m` vanish only disturbs a bounded number `r` of digits below `m + 1`.
//! This module measures that radius over finite windows. A radius is an
//! observation at a scale, never a proof.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::numsys::NumerationSystem;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CarryError {
    #[error("fewer than two nonzero integers below {bound} have vanishing digits 0..={m}")]
    WindowTooSmall { m: usize, bound: u64 },
    #[error("v(x_{index}, k + 2r) = {low_part} is not below G_k = {limit}")]
    PreconditionViolated {
        index: usize,
        low_part: u64,
        limit: u64,
    },
}

/// Rightward carry reach. `Unbounded` means some tested sum had a nonzero
/// digit 0, so no `r ≤ m` works at this scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Radius {
    Finite(usize),
    Unbounded,
}

impl Radius {
    pub fn finite(self) -> Option<usize> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Unbounded => None,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarryProfile {
    pub system: String,
    pub m_tested: usize,
    pub search_bound: u64,
    pub r_add: Radius,
    pub r_sub: Radius,
    pub pairs_tested: u64,
}

impl CarryProfile {
    /// Block radius for the separation constructions: `r_add + d`, or `None`
    /// when the additive radius is unbounded.
    pub fn block_radius(&self, degree: usize) -> Option<usize> {
        self.r_add.finite().map(|r| r + degree)
    }

    pub fn report(&self) -> Report {
        Report::new()
            .with("system", &self.system)
            .with("m", self.m_tested)
            .with("bound", self.search_bound)
            .with("r_add", self.r_add)
            .with("r_sub", self.r_sub)
            .with("pairs_tested", self.pairs_tested)
    }
}

/// All `x < bound` whose digits `0..=m` vanish, increasing.
pub fn enumerate_high_multiples(sys: &NumerationSystem, m: usize, bound: u64) -> Vec<u64> {
    if bound == 0 {
        return Vec::new();
    }
    let top = sys.digit_count_u64(bound - 1);
    if top <= m + 1 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut digits = vec![0; top];
    high_dfs(sys, &mut digits, top - 1, m + 1, 0, bound, &mut out);
    out.sort_unstable();
    out
}

fn high_dfs(
    sys: &NumerationSystem,
    digits: &mut [u32],
    pos: usize,
    low: usize,
    value: u64,
    bound: u64,
    out: &mut Vec<u64>,
) {
    let d = sys.degree();
    let top = digits.len();
    let g = sys.g(pos);
    for digit in 0..=sys.max_digit() {
        let v = value + digit as u64 * g;
        if v >= bound {
            break;
        }
        digits[pos] = digit;
        let closing = pos + d - 1;
        if closing < top && !sys.window_ok(digits, closing) {
            continue;
        }
        if pos == low {
            // windows that reach into the zero tail
            let last = (low + d - 1).min(top);
            if (low..last).all(|j| sys.window_ok(digits, j)) {
                out.push(v);
            }
        } else {
            high_dfs(sys, digits, pos - 1, low, v, bound, out);
        }
    }
    digits[pos] = 0;
}

fn spread(sys: &NumerationSystem, m: usize, z: u64) -> Radius {
    if z == 0 {
        return Radius::Finite(0);
    }
    let digits = sys.digits_u64(z);
    let lowest = digits.iter().position(|&x| x != 0).unwrap();
    if lowest == 0 {
        Radius::Unbounded
    } else {
        Radius::Finite((m + 1).saturating_sub(lowest))
    }
}

/// Radii forced by one pair: `(add, sub)` where `sub` is only defined for
/// `x ≥ y`.
pub fn pair_radius(sys: &NumerationSystem, m: usize, x: u64, y: u64) -> (Radius, Option<Radius>) {
    let add = spread(sys, m, x + y);
    let sub = (x >= y).then(|| spread(sys, m, x - y));
    (add, sub)
}

/// Minimal `r_add`, `r_sub` over every pair of integers below `bound` with
/// vanishing digits `0..=m`.
pub fn estimate_carry_radius(
    sys: &NumerationSystem,
    m: usize,
    bound: u64,
    exec: Execution,
) -> Result<CarryProfile, CarryError> {
    let candidates: Vec<u64> = enumerate_high_multiples(sys, m, bound)
        .into_iter()
        .filter(|&x| x != 0)
        .collect();
    if candidates.len() < 2 {
        return Err(CarryError::WindowTooSmall { m, bound });
    }
    let indices: Vec<usize> = (0..candidates.len()).collect();
    let zero = || (Radius::Finite(0), Radius::Finite(0), 0u64);
    let (r_add, r_sub, pairs) = exec::fold_reduce(
        exec,
        &indices,
        zero,
        |acc, &i| {
            let y = candidates[i];
            for &x in &candidates[i..] {
                let (add, sub) = pair_radius(sys, m, x, y);
                acc.0 = acc.0.max(add);
                acc.1 = acc.1.max(sub.unwrap());
                acc.2 += 1;
            }
        },
        |a, b| (a.0.max(b.0), a.1.max(b.1), a.2 + b.2),
    );
    Ok(CarryProfile {
        system: sys.label(),
        m_tested: m,
        search_bound: bound,
        r_add,
        r_sub,
        pairs_tested: pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub holds: bool,
    /// First digit index where the identity fails.
    pub witness: Option<usize>,
    pub low_parts: Vec<u64>,
}

/// Checks `δ_ℓ(Σx) = δ_ℓ(Σx − Σm) + δ_ℓ(Σm)` for every `ℓ`, where
/// `m_i = v(x_i, k + 2r)` must lie below `G_k`.
pub fn check_carry_separation(
    sys: &NumerationSystem,
    xs: &[u64],
    k: usize,
    r: usize,
) -> Result<SeparationReport, CarryError> {
    let limit = sys.g(k);
    let mut low_parts = Vec::with_capacity(xs.len());
    for (index, &x) in xs.iter().enumerate() {
        let low_part = sys.low_part_u64(x, k + 2 * r);
        if low_part >= limit {
            return Err(CarryError::PreconditionViolated {
                index,
                low_part,
                limit,
            });
        }
        low_parts.push(low_part);
    }
    let total: u64 = xs.iter().sum();
    let low: u64 = low_parts.iter().sum();
    let whole = sys.digits_u64(total);
    let high = sys.digits_u64(total - low);
    let low = sys.digits_u64(low);
    let at = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
    let len = whole.len().max(high.len()).max(low.len());
    let witness = (0..len).find(|&i| at(&whole, i) != at(&high, i) + at(&low, i));
    Ok(SeparationReport {
        holds: witness.is_none(),
        witness,
        low_parts,
    })
}
