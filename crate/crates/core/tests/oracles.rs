//! Library results against independent brute force.
//!
//! The oracle below shares no code with the library: it builds its own base
//! sequence, expands greedily, and multiplies the cube product out term by
//! term with `exp`.

use num_complex::Complex64;
use rdigits::carrylab::{estimate_carry_radius, Radius};
use rdigits::cubesum::{cube_sum_naive, decay_scan, CubeConfig, CubeQuery, Engine, Frequency};
use rdigits::proofkit::{class_sum, ClassSumQuery};
use rdigits::{Execution, NumerationSystem};

struct Oracle {
    g: Vec<u64>,
}

impl Oracle {
    fn new(a: &[u64]) -> Self {
        let d = a.len();
        let mut g: Vec<u64> = Vec::new();
        for i in 0..30 {
            let lower = if i < d { 1 } else { 0 };
            g.push(lower + (1..=i.min(d)).map(|j| a[j - 1] * g[i - j]).sum::<u64>());
        }
        Oracle { g }
    }

    fn digits(&self, mut n: u64) -> Vec<u64> {
        let mut out = vec![0; 30];
        for i in (0..30).rev() {
            out[i] = n / self.g[i];
            n %= self.g[i];
        }
        out
    }

    fn sod(&self, n: u64, lambda: usize) -> u64 {
        self.digits(n)[..=lambda].iter().sum()
    }

    fn cube(&self, s: usize, lambda: usize, theta: f64, keep: impl Fn(&[u64]) -> bool) -> Complex64 {
        let g = self.g[lambda];
        let mut total = Complex64::new(0.0, 0.0);
        for idx in 0..g.pow(s as u32 + 1) {
            let n: Vec<u64> = (0..=s).map(|i| idx / g.pow(i as u32) % g).collect();
            if !keep(&n) {
                continue;
            }
            let mut term = Complex64::new(1.0, 0.0);
            for eps in 0..1usize << s {
                let x = n[0] + (0..s).filter(|i| eps >> i & 1 == 1).map(|i| n[i + 1]).sum::<u64>();
                let z = Complex64::from_polar(1.0, std::f64::consts::TAU * theta * self.sod(x, lambda) as f64);
                term *= if eps.count_ones() % 2 == 1 { z.conj() } else { z };
            }
            total += term;
        }
        total / (g as f64).powi(s as i32 + 1)
    }

    fn low(&self, n: u64, mu: usize) -> u64 {
        self.digits(n)[..=mu].iter().zip(&self.g).map(|(d, g)| d * g).sum()
    }
}

fn lib(sys: &NumerationSystem, s: usize, lambda: usize, theta: Frequency) -> Complex64 {
    cube_sum_naive(&CubeQuery::new(sys, s, lambda, theta), &CubeConfig::default()).unwrap().value
}

#[test]
fn derived_cube_values() {
    let b2 = Oracle::new(&[2]);
    let z = Oracle::new(&[1, 1]);
    assert!((b2.cube(1, 2, 0.5, |_| true) - Complex64::new(0.25, 0.0)).norm() < 1e-12);
    assert!((z.cube(1, 1, 0.5, |_| true) - Complex64::new(0.5, 0.0)).norm() < 1e-12);

    let half = Frequency::ratio(1, 2);
    assert!((lib(&NumerationSystem::base(2).unwrap(), 1, 2, half) - b2.cube(1, 2, 0.5, |_| true)).norm() < 1e-12);
    assert!((lib(&NumerationSystem::zeckendorf(), 1, 1, half) - z.cube(1, 1, 0.5, |_| true)).norm() < 1e-12);
}

#[test]
fn cube_sums_across_systems() {
    for coeffs in [&[1u32, 1][..], &[1, 1, 1], &[2, 1], &[3, 2, 1], &[3]] {
        let sys = NumerationSystem::new(coeffs, None).unwrap();
        let oracle = Oracle::new(&coeffs.iter().map(|&c| c as u64).collect::<Vec<_>>());
        assert_eq!(oracle.g[..10], (0..10).map(|i| sys.g(i)).collect::<Vec<_>>()[..]);
        for (s, lambda) in [(1, 5), (2, 3), (3, 2)] {
            if sys.g(lambda) > 60 {
                continue;
            }
            for theta in [0.5, 0.3, 1.0 / 3.0, -0.41] {
                let got = lib(&sys, s, lambda, Frequency::Real(theta));
                let want = oracle.cube(s, lambda, theta, |_| true);
                assert!((got - want).norm() < 1e-12, "{coeffs:?} s={s} λ={lambda} θ={theta}");
            }
        }
    }
}

#[test]
fn zeckendorf_half_decay_rows() {
    let z = NumerationSystem::zeckendorf();
    let oracle = Oracle::new(&[1, 1]);
    let t = decay_scan(&z, 1, Frequency::ratio(1, 2), 2, 10, None, Engine::Naive, &CubeConfig::default()).unwrap();
    for row in &t.rows {
        let want = oracle.cube(1, row.lambda, 0.5, |_| true);
        assert!((row.value - want).norm() < 1e-12);
        // the rows happen to be exactly 1/G_λ
        assert!((row.modulus - 1.0 / oracle.g[row.lambda] as f64).abs() < 1e-12);
    }
    assert!(t.slope.unwrap() > 0.0);
}

#[test]
fn class_sum_example() {
    let z = NumerationSystem::zeckendorf();
    let oracle = Oracle::new(&[1, 1]);
    for n in [[0u64, 0], [1, 2], [2, 0]] {
        let q = ClassSumQuery {
            system: &z,
            s: 1,
            lambda: 5,
            mu: 1,
            theta: Frequency::ratio(1, 2),
            n: n.to_vec(),
        };
        let got = class_sum(&q, &CubeConfig::default()).unwrap();
        let want = oracle.cube(1, 5, 0.5, |x| oracle.low(x[0], 1) == n[0] && oracle.low(x[1], 1) == n[1]);
        assert!((got - want).norm() < 1e-13, "{n:?}: {got} vs {want}");
    }
}

#[test]
fn zeckendorf_carry_radius_against_pair_scan() {
    let z = NumerationSystem::zeckendorf();
    let oracle = Oracle::new(&[1, 1]);
    for (m, top) in [(3usize, 12usize), (5, 14), (8, 14)] {
        let bound = oracle.g[top];
        let cands: Vec<u64> = (1..bound).filter(|&x| oracle.digits(x)[..=m].iter().all(|&d| d == 0)).collect();
        let need = |z: u64| -> Option<usize> {
            if z == 0 {
                return Some(0);
            }
            let low = oracle.digits(z).iter().position(|&d| d != 0).unwrap();
            (low > 0).then(|| (m + 1).saturating_sub(low))
        };
        let (mut add, mut sub) = (Some(0), Some(0));
        for (i, &x) in cands.iter().enumerate() {
            for &y in &cands[..=i] {
                add = add.zip(need(x + y)).map(|(a, b)| a.max(b));
                sub = sub.zip(need(x - y)).map(|(a, b)| a.max(b));
            }
        }
        let p = estimate_carry_radius(&z, m, bound, Execution::Parallel).unwrap();
        let as_radius = |r: Option<usize>| r.map_or(Radius::Unbounded, Radius::Finite);
        assert_eq!((p.r_add, p.r_sub), (as_radius(add), as_radius(sub)), "m={m} bound=G_{top}");
    }
}
