//! Carry automaton for integer bases.
//!
//! Reading the `s + 1` numbers digit by digit from the bottom, each linear form
//! `n_0 + Σ ε_i n_i` needs only its pending carry (at most `s`) to emit its
//! next output digit. The state is the vector of carries over all `2^s`
//! vertices; the weight of a state is the normalized sum of phases of all digit
//! prefixes leading to it.

use num_bigint::BigUint;
use num_complex::Complex64;

use super::{check_dimension, CubeError, CubeValue, Frequency};
use crate::numsys::Truncation;

/// The cube sum for base `b` with `λ = k`, in `O(k · states · b^{s+1})`.
pub fn cube_sum_baseb_dp(
    b: u32,
    s: usize,
    k: usize,
    theta: &Frequency,
    truncation: Truncation,
) -> Result<CubeValue, CubeError> {
    check_dimension(s)?;
    assert!(b >= 2, "base must be at least 2");
    if (s as u64 + 1) > (b as u64).pow(2) {
        return Err(CubeError::UnsupportedShape { b, s });
    }
    let term_count = BigUint::from(b).pow((k * (s + 1)) as u32);
    if theta.is_integer() {
        // every factor is 1
        return Ok(CubeValue::new(Complex64::new(1.0, 0.0), term_count));
    }

    let vertices = 1usize << s;
    let radix = s + 1;
    let states = radix.pow(vertices as u32);
    let sign: Vec<i64> = (0..vertices)
        .map(|v| if v.count_ones() % 2 == 0 { 1 } else { -1 })
        .collect();

    // per digit tuple, the digit sum feeding each vertex
    let tuples = (b as usize).pow(radix as u32);
    let feeds: Vec<Vec<u32>> = (0..tuples)
        .map(|t| {
            let digits: Vec<u32> = (0..radix).map(|i| (t / (b as usize).pow(i as u32) % b as usize) as u32).collect();
            (0..vertices)
                .map(|v| digits[0] + (0..s).filter(|i| v >> i & 1 == 1).map(|i| digits[i + 1]).sum::<u32>())
                .collect()
        })
        .collect();

    let reach = (b as i64 - 1) << (s - 1);
    let phases: Vec<Complex64> = (-reach..=reach).map(|e| theta.phase(e)).collect();
    let scale = 1.0 / tuples as f64;

    let decode = |state: usize| -> Vec<u32> {
        (0..vertices).map(|v| (state / radix.pow(v as u32) % radix) as u32).collect()
    };

    let mut weights = vec![Complex64::new(0.0, 0.0); states];
    let mut live = vec![0usize];
    weights[0] = Complex64::new(1.0, 0.0);
    let mut next = vec![Complex64::new(0.0, 0.0); states];
    let mut seen = vec![false; states];

    for _ in 0..k {
        let mut next_live = Vec::new();
        for &state in &live {
            let w = weights[state] * scale;
            let carries = decode(state);
            for feed in &feeds {
                let mut e = 0i64;
                let mut target = 0usize;
                let mut place = 1usize;
                for v in 0..vertices {
                    let total = feed[v] + carries[v];
                    e += sign[v] * (total % b) as i64;
                    target += (total / b) as usize * place;
                    place *= radix;
                }
                next[target] += w * phases[(e + reach) as usize];
                if !seen[target] {
                    seen[target] = true;
                    next_live.push(target);
                }
            }
        }
        for &state in &live {
            weights[state] = Complex64::new(0.0, 0.0);
        }
        for &state in &next_live {
            seen[state] = false;
        }
        std::mem::swap(&mut weights, &mut next);
        next_live.sort_unstable();
        live = next_live;
    }

    let mut value = Complex64::new(0.0, 0.0);
    for &state in &live {
        let e = match truncation {
            // the leftover carry is the digit at position k
            Truncation::Inclusive => decode(state)
                .iter()
                .zip(&sign)
                .map(|(&c, &sg)| sg * (c % b) as i64)
                .sum(),
            Truncation::Exclusive => 0,
        };
        value += weights[state] * theta.phase(e);
    }
    Ok(CubeValue::new(value, term_count))
}
