//! Dominant root and conjugate moduli of the characteristic polynomial.
//!
//! The dominant root is bracketed by bisection on `[1, 1 + Σ a_i]`, where the
//! polynomial has exactly one positive root (one sign change). Conjugates come
//! from Aberth iteration on the deflated polynomial, polished by Newton on the
//! full polynomial. Each conjugate carries an inclusion radius `d |p(z)/p'(z)|`:
//! the disk of that radius around `z` contains a root of `p`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{NumerationSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootProfile {
    pub beta: f64,
    /// Half-width of the final bisection bracket.
    pub beta_error: f64,
    pub conjugates: Vec<(f64, f64)>,
    pub conjugate_moduli: Vec<f64>,
    /// Inclusion radius for each conjugate.
    pub conjugate_radii: Vec<f64>,
    pub is_pisot: bool,
    pub tolerance: f64,
}

pub(super) fn analyze(sys: &NumerationSystem, tolerance: f64) -> Result<RootProfile, SystemError> {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let poly = sys.characteristic_polynomial();
    let d = poly.len() - 1;

    let (beta, beta_error) = if d == 1 {
        (-poly[1], 0.0)
    } else {
        bisect_dominant(&poly, tolerance)
    };

    let mut conjugates = Vec::new();
    let mut radii = Vec::new();
    if d > 1 {
        let deflated = deflate(&poly, beta);
        for z in aberth(&deflated) {
            let z = newton_polish(&poly, z);
            let (p, dp) = eval_complex(&poly, z);
            let radius = if p == Complex64::new(0.0, 0.0) {
                0.0
            } else if dp.norm() == 0.0 {
                f64::INFINITY
            } else {
                d as f64 * p.norm() / dp.norm()
            };
            conjugates.push(z);
            radii.push(radius);
        }
    }

    let moduli: Vec<f64> = conjugates.iter().map(|z| z.norm()).collect();
    let mut is_pisot = true;
    for (&m, &rad) in moduli.iter().zip(&radii) {
        // the certificate gets a small slack for rounding in |p| and |p'|
        let slack = rad + 8.0 * f64::EPSILON * m.max(1.0);
        let below = m < 1.0 - tolerance || m + slack < 1.0;
        let above = m > 1.0 + tolerance || m - slack > 1.0;
        if !below && !above {
            return Err(SystemError::RootUncertain {
                modulus: m,
                tolerance,
            });
        }
        is_pisot &= below;
    }

    Ok(RootProfile {
        beta,
        beta_error,
        conjugates: conjugates.iter().map(|z| (z.re, z.im)).collect(),
        conjugate_moduli: moduli,
        conjugate_radii: radii,
        is_pisot,
        tolerance,
    })
}

fn eval_real(poly: &[f64], x: f64) -> f64 {
    poly.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_complex(poly: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in poly {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn bisect_dominant(poly: &[f64], tolerance: f64) -> (f64, f64) {
    let sum: f64 = poly[1..].iter().map(|c| -c).sum();
    let (mut lo, mut hi) = (1.0, 1.0 + sum);
    debug_assert!(eval_real(poly, lo) <= 0.0 && eval_real(poly, hi) > 0.0);
    for _ in 0..200 {
        if hi - lo <= tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = eval_real(poly, mid);
        if v == 0.0 {
            return (mid, 0.0);
        }
        if v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi), 0.5 * (hi - lo))
}

/// Synthetic division by `(x − root)`, dropping the remainder.
fn deflate(poly: &[f64], root: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(poly.len() - 1);
    let mut acc = 0.0;
    for &c in &poly[..poly.len() - 1] {
        acc = acc * root + c;
        out.push(acc);
    }
    out
}

fn aberth(poly: &[f64]) -> Vec<Complex64> {
    let n = poly.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = poly[0];
    // Cauchy bound on root moduli
    let bound = 1.0 + poly[1..].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_complex(poly, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-16 * bound {
            break;
        }
    }
    z
}

fn newton_polish(poly: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = eval_complex(poly, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        if (next - z).norm() <= 1e-17 * z.norm().max(1.0) {
            z = next;
            break;
        }
        z = next;
    }
    z
}
