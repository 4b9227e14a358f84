//! Linearly recurrent numeration systems.
//!
//! A system is given by recurrence coefficients `(a_1, …, a_d)` with `a_d > 0`
//! and an initial block `G_0 = 1 < G_1 < … < G_{d-1}`. Every nonnegative
//! integer has a unique greedy expansion `n = Σ δ_i G_i`, and the expansions
//! produced this way are exactly the digit strings whose length-`d` windows
//! are lexicographically below `(a_1, …, a_d)` (when the initial block is the
//! default one).

mod digits;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use digits::DigitString;
pub use roots::RootProfile;

/// A single digit. Digits never exceed `a_1`.
pub type Digit = u32;

/// Default tolerance for dominant-root analysis.
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("coefficient vector is empty")]
    EmptyCoefficients,
    #[error("last coefficient a_d must be positive")]
    ZeroLastCoefficient,
    #[error("Parry condition fails: (a_{shift},…,a_d) is lexicographically above (a_1,…,a_{tail_end})")]
    ParryViolation { shift: usize, tail_end: usize },
    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("initial block must have length {expected} and start with 1, got {got:?}")]
    BadInitialBlock { expected: usize, got: Vec<u64> },
    #[error("a conjugate of modulus {modulus} lies within {tolerance} of the unit circle")]
    RootUncertain { modulus: f64, tolerance: f64 },
    #[error("malformed system file: {0}")]
    Parse(String),
}

/// Which digit indices a truncated digit sum keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Truncation {
    /// Digits `0..=λ`.
    #[default]
    Inclusive,
    /// Digits `0..λ`.
    Exclusive,
}

impl Truncation {
    /// Number of low digits kept at truncation index `lambda`.
    pub fn kept(self, lambda: usize) -> usize {
        match self {
            Truncation::Inclusive => lambda + 1,
            Truncation::Exclusive => lambda,
        }
    }
}

/// On-disk description of a system (TOML key-value document).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(default)]
    pub name: Option<String>,
    pub coeffs: Vec<u32>,
    #[serde(default)]
    pub initial: Option<Vec<u64>>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        toml::from_str(text).map_err(|e| SystemError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<NumerationSystem, SystemError> {
        let sys = NumerationSystem::new(&self.coeffs, self.initial.as_deref())?;
        Ok(match &self.name {
            Some(name) => sys.with_name(name.clone()),
            None => sys,
        })
    }
}

pub struct NumerationSystem {
    name: Option<String>,
    coeffs: Vec<u32>,
    initial: Vec<u64>,
    /// Every term that fits in a `u64`, computed once at construction.
    small: Vec<u64>,
    /// Memoized unbounded terms; always a superset prefix of `small`.
    big: RwLock<Vec<BigUint>>,
}

impl NumerationSystem {
    /// Validates `coeffs` and builds the system. Without an explicit initial
    /// block the default `G_0 = 1`, `G_i = 1 + Σ_{j=1}^{i} a_j G_{i-j}` is used.
    pub fn new(coeffs: &[u32], initial: Option<&[u64]>) -> Result<Self, SystemError> {
        let d = coeffs.len();
        if d == 0 {
            return Err(SystemError::EmptyCoefficients);
        }
        if coeffs[d - 1] == 0 {
            return Err(SystemError::ZeroLastCoefficient);
        }
        check_parry(coeffs)?;

        let initial = match initial {
            Some(block) => {
                if block.len() != d || block[0] != 1 {
                    return Err(SystemError::BadInitialBlock {
                        expected: d,
                        got: block.to_vec(),
                    });
                }
                block.to_vec()
            }
            None => default_initial(coeffs)?,
        };

        let mut big: Vec<BigUint> = initial.iter().map(|&g| BigUint::from(g)).collect();
        // d + 1 terms settle monotonicity: beyond that, a_1 >= 1 (forced by
        // Parry) and a_d G_{n-d} >= 1 keep the sequence increasing when d >= 2,
        // and d = 1 needs a_1 >= 2 which G_1 > G_0 already checks.
        extend_terms(coeffs, &mut big, d + 1);
        for i in 1..big.len() {
            if big[i] <= big[i - 1] {
                return Err(SystemError::NotIncreasing { index: i });
            }
        }

        let mut small = Vec::new();
        let mut i = 0;
        loop {
            if i >= big.len() {
                extend_terms(coeffs, &mut big, i + 1);
            }
            match big[i].to_u64() {
                Some(v) => small.push(v),
                None => break,
            }
            i += 1;
        }

        Ok(NumerationSystem {
            name: None,
            coeffs: coeffs.to_vec(),
            initial,
            small,
            big: RwLock::new(big),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn zeckendorf() -> Self {
        Self::new(&[1, 1], None).unwrap().with_name("zeckendorf")
    }

    pub fn tribonacci() -> Self {
        Self::new(&[1, 1, 1], None).unwrap().with_name("tribonacci")
    }

    /// Standard base-`b` system, `G_i = b^i`.
    pub fn base(b: u32) -> Result<Self, SystemError> {
        Ok(Self::new(&[b], None)?.with_name(format!("base{b}")))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Name, or the coefficient vector when unnamed.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{:?}", self.coeffs),
        }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn initial(&self) -> &[u64] {
        &self.initial
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest admissible digit.
    pub fn max_digit(&self) -> Digit {
        self.coeffs[0]
    }

    /// `Some(b)` when this is the plain base-`b` system.
    pub fn integer_base(&self) -> Option<u32> {
        (self.coeffs.len() == 1).then(|| self.coeffs[0])
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            name: self.name.clone(),
            coeffs: self.coeffs.clone(),
            initial: Some(self.initial.clone()),
        }
    }

    /// Exact `G_i`.
    pub fn term(&self, i: usize) -> BigUint {
        if let Some(&v) = self.small.get(i) {
            return BigUint::from(v);
        }
        {
            let big = self.big.read().unwrap();
            if let Some(v) = big.get(i) {
                return v.clone();
            }
        }
        let mut big = self.big.write().unwrap();
        extend_terms(&self.coeffs, &mut big, i + 1);
        big[i].clone()
    }

    /// `G_i` when it fits in a `u64`.
    pub fn term_u64(&self, i: usize) -> Option<u64> {
        self.small.get(i).copied()
    }

    /// Every term that fits in a `u64`.
    pub fn small_terms(&self) -> &[u64] {
        &self.small
    }

    /// `G_i`, panicking if it does not fit in a `u64`. Used by the
    /// desk-scale enumerations where every term is small by construction.
    pub fn g(&self, i: usize) -> u64 {
        self.term_u64(i)
            .unwrap_or_else(|| panic!("G_{i} exceeds u64 for system {}", self.label()))
    }

    /// Number of digits needed to write `n`: the least `L` with `n < G_L`.
    pub fn digit_count_u64(&self, n: u64) -> usize {
        self.small.partition_point(|&g| g <= n)
    }

    /// Greedy expansion of an arbitrary nonnegative integer.
    pub fn greedy_expand(&self, n: &BigUint) -> DigitString<'_> {
        if let Some(small) = n.to_u64() {
            return DigitString::from_raw(self, self.digits_u64(small));
        }
        let mut top = self.small.len();
        while self.term(top) <= *n {
            top += 1;
        }
        let mut digits = vec![0; top];
        let mut rest = n.clone();
        for i in (0..top).rev() {
            let g = self.term(i);
            if rest >= g {
                let q = &rest / &g;
                rest -= &q * &g;
                digits[i] = q.to_u32().expect("greedy digit exceeds u32");
            }
        }
        DigitString::from_raw(self, digits)
    }

    /// Little-endian greedy digits of `n`, without trailing zeros.
    pub fn digits_u64(&self, mut n: u64) -> Vec<Digit> {
        let len = self.digit_count_u64(n);
        let mut digits = vec![0; len];
        for i in (0..len).rev() {
            let g = self.small[i];
            if n >= g {
                digits[i] = (n / g) as Digit;
                n %= g;
            }
        }
        debug_assert_eq!(n, 0);
        digits
    }

    /// `Σ δ_i G_i`; accepts non-admissible strings.
    pub fn value_of(&self, digits: &[Digit]) -> BigUint {
        digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .fold(BigUint::zero(), |acc, (i, &d)| acc + self.term(i) * d)
    }

    /// `Σ δ_i G_i` when it fits in a `u64`.
    pub fn value_u64(&self, digits: &[Digit]) -> Option<u64> {
        let mut acc: u64 = 0;
        for (i, &d) in digits.iter().enumerate() {
            if d != 0 {
                let g = self.term_u64(i)?;
                acc = acc.checked_add(g.checked_mul(d as u64)?)?;
            }
        }
        Some(acc)
    }

    /// Canonical-expansion test: the string equals the greedy expansion of
    /// its own value (trailing zeros ignored).
    pub fn is_admissible(&self, digits: &[Digit]) -> bool {
        let expanded = self.greedy_expand(&self.value_of(digits));
        expanded.digits() == trim(digits)
    }

    /// Window criterion: every length-`d` window `(δ_i, …, δ_{i-d+1})`,
    /// zero-padded below index 0, is strictly below `(a_1, …, a_d)`.
    pub fn window_admissible(&self, digits: &[Digit]) -> bool {
        let digits = trim(digits);
        (0..digits.len()).all(|top| self.window_ok(digits, top))
    }

    /// Whether the window starting at `top` (going down) is strictly below
    /// the coefficient vector.
    pub(crate) fn window_ok(&self, digits: &[Digit], top: usize) -> bool {
        for (j, &a) in self.coeffs.iter().enumerate() {
            let d = if j <= top {
                digits.get(top - j).copied().unwrap_or(0)
            } else {
                0
            };
            match d.cmp(&a) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        false
    }

    pub fn sum_of_digits(&self, n: &BigUint) -> u64 {
        self.greedy_expand(n).sum()
    }

    pub fn sum_of_digits_u64(&self, n: u64) -> u64 {
        self.digits_u64(n).iter().map(|&d| d as u64).sum()
    }

    /// `Σ_{i=0}^{λ} δ_i(n)` (inclusive).
    pub fn truncated_sum_of_digits(&self, n: &BigUint, lambda: usize) -> u64 {
        self.truncated_sum_with(n, lambda, Truncation::Inclusive)
    }

    pub fn truncated_sum_with(&self, n: &BigUint, lambda: usize, trunc: Truncation) -> u64 {
        let s = self.greedy_expand(n);
        s.digits().iter().take(trunc.kept(lambda)).map(|&d| d as u64).sum()
    }

    pub fn truncated_sum_u64(&self, n: u64, lambda: usize, trunc: Truncation) -> u64 {
        self.digits_u64(n)
            .iter()
            .take(trunc.kept(lambda))
            .map(|&d| d as u64)
            .sum()
    }

    /// `v(n, λ) = Σ_{i=0}^{λ} δ_i(n) G_i`, the integer carried by the low
    /// digits `0..=λ`.
    pub fn low_part(&self, n: &BigUint, lambda: usize) -> BigUint {
        let s = self.greedy_expand(n);
        let low = &s.digits()[..s.digits().len().min(lambda + 1)];
        self.value_of(low)
    }

    pub fn low_part_u64(&self, n: u64, lambda: usize) -> u64 {
        let digits = self.digits_u64(n);
        let keep = digits.len().min(lambda + 1);
        digits[..keep]
            .iter()
            .zip(&self.small)
            .map(|(&d, &g)| d as u64 * g)
            .sum()
    }

    /// Characteristic polynomial `X^d − a_1 X^{d−1} − ⋯ − a_d`, highest
    /// degree first.
    pub fn characteristic_polynomial(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.coeffs.iter().map(|&a| -(a as f64)))
            .collect()
    }

    pub fn dominant_root(&self, tolerance: f64) -> Result<RootProfile, SystemError> {
        roots::analyze(self, tolerance)
    }

    /// Savings constant `h = (a_1 − 1) + a_2 + ⋯ + a_d`: the digit-sum drop
    /// when the string `(a_1, …, a_d)` collapses into a single digit.
    pub fn savings_constant(&self) -> u64 {
        self.coeffs.iter().map(|&a| a as u64).sum::<u64>() - 1
    }
}

impl Clone for NumerationSystem {
    fn clone(&self) -> Self {
        NumerationSystem {
            name: self.name.clone(),
            coeffs: self.coeffs.clone(),
            initial: self.initial.clone(),
            small: self.small.clone(),
            big: RwLock::new(self.big.read().unwrap().clone()),
        }
    }
}

impl fmt::Debug for NumerationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumerationSystem")
            .field("name", &self.name)
            .field("coeffs", &self.coeffs)
            .field("initial", &self.initial)
            .finish()
    }
}

impl PartialEq for NumerationSystem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.initial == other.initial
    }
}

fn check_parry(coeffs: &[u32]) -> Result<(), SystemError> {
    let d = coeffs.len();
    for shift in 2..=d {
        let tail = &coeffs[shift - 1..];
        let head = &coeffs[..d - shift + 1];
        if tail > head {
            return Err(SystemError::ParryViolation {
                shift,
                tail_end: d - shift + 1,
            });
        }
    }
    Ok(())
}

fn default_initial(coeffs: &[u32]) -> Result<Vec<u64>, SystemError> {
    let d = coeffs.len();
    let mut g: Vec<u64> = vec![1];
    for i in 1..d {
        let mut v: u64 = 1;
        for j in 1..=i {
            v = v
                .checked_add((coeffs[j - 1] as u64).checked_mul(g[i - j]).ok_or(
                    SystemError::BadInitialBlock {
                        expected: d,
                        got: g.clone(),
                    },
                )?)
                .ok_or(SystemError::BadInitialBlock {
                    expected: d,
                    got: g.clone(),
                })?;
        }
        g.push(v);
    }
    Ok(g)
}

fn extend_terms(coeffs: &[u32], terms: &mut Vec<BigUint>, len: usize) {
    let d = coeffs.len();
    while terms.len() < len {
        let n = terms.len();
        let next = coeffs
            .iter()
            .enumerate()
            .fold(BigUint::zero(), |acc, (j, &a)| acc + &terms[n - 1 - j] * a);
        debug_assert!(n >= d);
        terms.push(next);
    }
}

/// Drops high zero digits.
pub(crate) fn trim(digits: &[Digit]) -> &[Digit] {
    let len = digits.iter().rposition(|&d| d != 0).map_or(0, |p| p + 1);
    &digits[..len]
}
