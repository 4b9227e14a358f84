use std::fmt;

use num_bigint::BigUint;

use super::{trim, Digit, NumerationSystem};

/// Little-endian digit vector tied to the system that interprets it.
///
/// Strings built by [`NumerationSystem::greedy_expand`] are canonical; strings
/// built with [`DigitString::new`] may be arbitrary and are useful as test
/// inputs to [`DigitString::is_admissible`].
#[derive(Clone)]
pub struct DigitString<'a> {
    system: &'a NumerationSystem,
    digits: Vec<Digit>,
}

impl<'a> DigitString<'a> {
    pub fn new(system: &'a NumerationSystem, digits: impl Into<Vec<Digit>>) -> Self {
        Self::from_raw(system, digits.into())
    }

    pub(super) fn from_raw(system: &'a NumerationSystem, mut digits: Vec<Digit>) -> Self {
        let len = trim(&digits).len();
        digits.truncate(len);
        DigitString { system, digits }
    }

    pub fn system(&self) -> &'a NumerationSystem {
        self.system
    }

    /// Digits without high zeros; empty for zero.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    /// `δ_i`, zero past the end.
    pub fn digit(&self, i: usize) -> Digit {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.system.value_of(&self.digits)
    }

    pub fn sum(&self) -> u64 {
        self.digits.iter().map(|&d| d as u64).sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.system.is_admissible(&self.digits)
    }

    pub fn window_admissible(&self) -> bool {
        self.system.window_admissible(&self.digits)
    }

    pub fn into_digits(self) -> Vec<Digit> {
        self.digits
    }
}

impl PartialEq for DigitString<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system && self.digits == other.digits
    }
}

impl Eq for DigitString<'_> {}

impl fmt::Debug for DigitString<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitString({})", self)
    }
}

/// Comma-separated, least significant digit first; `0` for the empty string.
impl fmt::Display for DigitString<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("0");
        }
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
