use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// `‖θ‖`, the distance to the nearest integer.
pub fn fractional_norm(theta: f64) -> f64 {
    (theta - theta.round()).abs()
}

/// A frequency `θ`.
///
/// Rationals evaluate `e(θE)` through `pE mod q`, so the phase depends only on
/// the residue and `θ + 1` gives bit-identical results. Reals evaluate through
/// the double-precision fractional part of `θ` and then of `θE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Frequency {
    /// `num / den` in lowest terms, `den > 0`.
    Ratio { num: i64, den: u64 },
    Real(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read frequency {0:?}: expected p/q or a decimal")]
pub struct FrequencyParseError(pub String);

impl Frequency {
    pub fn ratio(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = (num.unsigned_abs()).gcd(&den).max(1);
        Frequency::Ratio {
            num: num / g as i64,
            den: den / g,
        }
    }

    pub fn real(theta: f64) -> Self {
        assert!(theta.is_finite(), "frequency must be finite");
        Frequency::Real(theta)
    }

    pub fn zero() -> Self {
        Frequency::Ratio { num: 0, den: 1 }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Frequency::Ratio { num, den } => num as f64 / den as f64,
            Frequency::Real(t) => t,
        }
    }

    pub fn is_integer(&self) -> bool {
        match *self {
            Frequency::Ratio { den, .. } => den == 1,
            Frequency::Real(t) => t.fract() == 0.0,
        }
    }

    /// `‖θ‖`.
    pub fn norm(&self) -> f64 {
        match *self {
            Frequency::Ratio { num, den } => {
                let r = num.rem_euclid(den as i64) as u64;
                r.min(den - r) as f64 / den as f64
            }
            Frequency::Real(t) => fractional_norm(t),
        }
    }

    /// `kθ`.
    pub fn scale(&self, k: i64) -> Self {
        match *self {
            Frequency::Ratio { num, den } => {
                // reduce first so the product stays small
                let num = num.rem_euclid(den as i64) as i128 * k as i128;
                let num = num.rem_euclid(den as i128) as i64;
                Frequency::ratio(num, den)
            }
            Frequency::Real(t) => Frequency::Real(t * k as f64),
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            Frequency::Ratio { num, den } => Frequency::Ratio { num: -num, den },
            Frequency::Real(t) => Frequency::Real(-t),
        }
    }

    /// `θ + k`.
    pub fn shift(&self, k: i64) -> Self {
        match *self {
            Frequency::Ratio { num, den } => Frequency::ratio(num + k * den as i64, den),
            Frequency::Real(t) => Frequency::Real(t + k as f64),
        }
    }

    /// `e(θ e) = exp(2πi θ e)`, with `e(−θ e)` the exact conjugate.
    pub fn phase(&self, e: i64) -> Complex64 {
        match *self {
            Frequency::Ratio { num, den } => {
                let q = den as i128;
                let mut j = (num as i128 * e as i128).rem_euclid(q);
                if 2 * j > q {
                    j -= q;
                }
                turn(j as f64 / den as f64)
            }
            Frequency::Real(t) => {
                let r = t - t.round();
                let x = r * e as f64;
                turn(x - x.round())
            }
        }
    }
}

/// `exp(2πi x)` for `x ∈ [−1/2, 1/2]`, odd in `x` bit for bit.
fn turn(x: f64) -> Complex64 {
    let a = x.abs();
    let (s, c) = if a == 0.0 {
        (0.0, 1.0)
    } else if a == 0.5 {
        (0.0, -1.0)
    } else if a == 0.25 {
        (1.0, 0.0)
    } else {
        (2.0 * std::f64::consts::PI * a).sin_cos()
    };
    Complex64::new(c, if x < 0.0 { -s } else { s })
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Frequency::Ratio { num, den: 1 } => write!(f, "{num}"),
            Frequency::Ratio { num, den } => write!(f, "{num}/{den}"),
            Frequency::Real(t) => write!(f, "{t}"),
        }
    }
}

/// `p/q` or an integer gives a ratio; anything else that parses as `f64` is a
/// real.
impl FromStr for Frequency {
    type Err = FrequencyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FrequencyParseError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| err())?;
            let q: u64 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            return Ok(Frequency::ratio(p, q));
        }
        if let Ok(k) = t.parse::<i64>() {
            return Ok(Frequency::ratio(k, 1));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Frequency::Real(x)),
            _ => Err(err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert_eq!(fractional_norm(0.5), 0.5);
        assert_eq!(fractional_norm(1.25), 0.25);
        assert_eq!(fractional_norm(3.0), 0.0);
        assert_eq!(fractional_norm(-0.75), 0.25);
        assert_eq!(Frequency::ratio(7, 3).norm(), 1.0 / 3.0);
        assert_eq!(Frequency::ratio(-1, 2).norm(), 0.5);
    }

    #[test]
    fn parsing() {
        assert_eq!("1/2".parse::<Frequency>().unwrap(), Frequency::Ratio { num: 1, den: 2 });
        assert_eq!("2/4".parse::<Frequency>().unwrap(), Frequency::Ratio { num: 1, den: 2 });
        assert_eq!("-2".parse::<Frequency>().unwrap(), Frequency::Ratio { num: -2, den: 1 });
        assert_eq!("0.3".parse::<Frequency>().unwrap(), Frequency::Real(0.3));
        for bad in ["1/0", "x", "1/2/3", "nan", "inf"] {
            assert!(bad.parse::<Frequency>().is_err(), "{bad}");
        }
        for f in [Frequency::ratio(-3, 7), Frequency::ratio(5, 1), Frequency::Real(0.1)] {
            assert_eq!(f.to_string().parse::<Frequency>().unwrap(), f);
        }
    }

    #[test]
    fn phases_match_exp() {
        for f in [Frequency::ratio(1, 3), Frequency::ratio(-5, 12), Frequency::Real(0.3), Frequency::Real(-2.7)] {
            for e in -20..=20 {
                let z = f.phase(e);
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f.as_f64() * e as f64);
                assert!((z - w).norm() < 1e-12, "{f} {e}");
            }
        }
    }

    #[test]
    fn exact_special_values() {
        let half = Frequency::ratio(1, 2);
        assert_eq!(half.phase(1), Complex64::new(-1.0, 0.0));
        assert_eq!(half.phase(2), Complex64::new(1.0, 0.0));
        assert_eq!(Frequency::ratio(1, 4).phase(3), Complex64::new(0.0, -1.0));
        assert_eq!(Frequency::Real(0.5).phase(3), Complex64::new(-1.0, 0.0));
        assert_eq!(Frequency::Real(4.0).phase(7), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn conjugation_and_period_are_exact() {
        for f in [Frequency::ratio(2, 7), Frequency::Real(0.3), Frequency::Real(0.125)] {
            for e in -30..=30 {
                assert_eq!(f.neg().phase(e), f.phase(e).conj());
            }
        }
        for f in [Frequency::ratio(2, 7), Frequency::Real(0.375)] {
            for e in -30..=30 {
                assert_eq!(f.shift(1).phase(e), f.phase(e));
                assert_eq!(f.shift(-3).phase(e), f.phase(e));
            }
        }
    }

    #[test]
    fn scaling() {
        assert_eq!(Frequency::ratio(1, 3).scale(3), Frequency::ratio(0, 1));
        assert!(Frequency::ratio(1, 3).scale(3).is_integer());
        assert_eq!(Frequency::ratio(2, 5).scale(4), Frequency::ratio(3, 5));
        assert_eq!(Frequency::Real(0.25).scale(2), Frequency::Real(0.5));
    }
}
