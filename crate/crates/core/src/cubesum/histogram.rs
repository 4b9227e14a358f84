//! Exact histograms of the alternating digit-sum exponent
//! `E = Σ_ε (−1)^{|ε|} t(x_0 + Σ ε_i x_i)` over a box of coordinate choices.
//!
//! Counting `E` with integer counts keeps the enumeration exact and
//! independent of scheduling; the complex sum is formed once, afterwards, in a
//! fixed order.

use num_complex::Complex64;

use super::Frequency;
use crate::exec::{self, Execution};

/// Counts of each exponent value `E`, stored densely from `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    offset: i64,
    counts: Vec<u64>,
}

impl Histogram {
    fn empty(radius: i64) -> Self {
        Histogram {
            offset: -radius,
            counts: vec![0; (2 * radius + 1) as usize],
        }
    }

    fn merge(mut self, other: Histogram) -> Histogram {
        debug_assert_eq!(self.offset, other.offset);
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(E, count)` for every exponent that occurs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (self.offset + i as i64, c))
    }

    pub fn count(&self, e: i64) -> u64 {
        let i = e - self.offset;
        if i < 0 {
            return 0;
        }
        self.counts.get(i as usize).copied().unwrap_or(0)
    }

    /// `Σ count(E) e(θE)`, compensated.
    pub fn phase_sum(&self, theta: &Frequency) -> Complex64 {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (e, c) in self.iter() {
            let z = theta.phase(e) * c as f64;
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.total(), im.total())
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Histogram of `E` over `x_i ∈ coords[i]` for the digit function `t`, which
/// must not exceed `t_max` on any `x_0 + Σ x_i`.
///
/// Work is split over `coords[0]`.
pub fn exponent_histogram<T>(t: T, t_max: u64, coords: &[Vec<u64>], exec: Execution) -> Histogram
where
    T: Fn(u64) -> u64 + Sync + Send,
{
    let s = coords.len() - 1;
    assert!((1..=3).contains(&s), "cube dimension must be 1, 2 or 3");
    let radius = (t_max as i64) << (s - 1);
    exec::fold_reduce(
        exec,
        &coords[0],
        || Histogram::empty(radius),
        |hist, &x0| {
            let mut vertices = [0u64; 8];
            vertices[0] = x0;
            walk(&t, coords, 1, &mut vertices, hist);
        },
        Histogram::merge,
    )
}

fn walk<T: Fn(u64) -> u64>(t: &T, coords: &[Vec<u64>], level: usize, vertices: &mut [u64; 8], hist: &mut Histogram) {
    let s = coords.len() - 1;
    let half = 1usize << (level - 1);
    if level == s {
        // vertices without the last bit are fixed for the whole inner loop
        let fixed: i64 = (0..half).map(|j| sign(j) * t(vertices[j]) as i64).sum();
        for &x in &coords[level] {
            let moving: i64 = (0..half)
                .map(|j| sign(j | half) * t(vertices[j] + x) as i64)
                .sum();
            hist.counts[(fixed + moving - hist.offset) as usize] += 1;
        }
        return;
    }
    for &x in &coords[level] {
        for j in 0..half {
            vertices[j + half] = vertices[j] + x;
        }
        walk(t, coords, level + 1, vertices, hist);
    }
}

fn sign(vertex: usize) -> i64 {
    if vertex.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}
