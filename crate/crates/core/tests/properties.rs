//! Randomized invariants across modules.

use num_bigint::BigUint;
use proptest::prelude::*;
use rdigits::carrylab::{check_carry_separation, estimate_carry_radius, Radius};
use rdigits::cubesum::{cube_sum_baseb_dp, cube_sum_naive, CubeConfig, CubeQuery, Frequency};
use rdigits::proofkit::{admissible_patterns, build_cancellation_pair, cosine_savings, PairLayout};
use rdigits::{Execution, NumerationSystem, Truncation};

fn systems() -> Vec<NumerationSystem> {
    [&[1u32, 1][..], &[1, 1, 1], &[2, 1], &[3, 2, 1], &[2], &[3], &[2, 0, 1], &[1, 0, 1]]
        .iter()
        .map(|c| NumerationSystem::new(c, None).unwrap())
        .collect()
}

fn any_system() -> impl Strategy<Value = NumerationSystem> {
    (0..systems().len()).prop_map(|i| systems().swap_remove(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn big_round_trip(sys in any_system(), limbs in prop::collection::vec(any::<u32>(), 1..5)) {
        let n = BigUint::new(limbs);
        let e = sys.greedy_expand(&n);
        prop_assert_eq!(e.value(), n);
        prop_assert!(e.window_admissible());
    }

    #[test]
    fn window_criterion_matches_greedy(sys in any_system(), raw in prop::collection::vec(0u32..4, 0..11)) {
        let digits: Vec<u32> = raw.into_iter().map(|d| d % (sys.max_digit() + 1)).collect();
        prop_assert_eq!(sys.window_admissible(&digits), sys.is_admissible(&digits));
    }

    #[test]
    fn low_part_laws(sys in any_system(), n in 0u64..1_000_000, lambda in 0usize..14) {
        let low = sys.low_part_u64(n, lambda);
        prop_assert_eq!(sys.low_part_u64(low, lambda), low);
        prop_assert_eq!(sys.truncated_sum_u64(n, lambda, Truncation::Inclusive), sys.sum_of_digits_u64(low));
        prop_assert!(BigUint::from(low) < sys.term(lambda + 1));
    }

    #[test]
    fn cube_sum_is_bounded_and_symmetric(
        sys in any_system(),
        s in 1usize..=2,
        lambda in 1usize..5,
        theta in -3.0f64..3.0,
    ) {
        let config = CubeConfig::default();
        let v = cube_sum_naive(&CubeQuery::new(&sys, s, lambda, Frequency::Real(theta)), &config).unwrap();
        let w = cube_sum_naive(&CubeQuery::new(&sys, s, lambda, Frequency::Real(-theta)), &config).unwrap();
        prop_assert!(v.modulus <= 1.0 + 1e-12);
        prop_assert_eq!(v.value, w.value.conj());
    }

    #[test]
    fn rational_frequency_has_period_one(
        sys in any_system(),
        s in 1usize..=2,
        lambda in 1usize..5,
        p in -20i64..20,
        q in 1u64..13,
        shift in -3i64..3,
    ) {
        let config = CubeConfig::default();
        let a = Frequency::ratio(p, q);
        let v = cube_sum_naive(&CubeQuery::new(&sys, s, lambda, a), &config).unwrap();
        let w = cube_sum_naive(&CubeQuery::new(&sys, s, lambda, a.shift(shift)), &config).unwrap();
        prop_assert_eq!(v.value, w.value);
    }

    #[test]
    fn dyadic_real_frequency_has_period_one(sys in any_system(), lambda in 1usize..5, k in 0i64..64) {
        let config = CubeConfig::default();
        let t = k as f64 / 64.0;
        let v = cube_sum_naive(&CubeQuery::new(&sys, 1, lambda, Frequency::Real(t)), &config).unwrap();
        let w = cube_sum_naive(&CubeQuery::new(&sys, 1, lambda, Frequency::Real(t + 1.0)), &config).unwrap();
        prop_assert_eq!(v.value, w.value);
    }

    #[test]
    fn dp_matches_naive(b in 2u32..5, s in 1usize..=2, k in 0usize..4, theta in -1.0f64..1.0) {
        let sys = NumerationSystem::base(b).unwrap();
        let t = Frequency::Real(theta);
        let naive = cube_sum_naive(&CubeQuery::new(&sys, s, k, t), &CubeConfig::default()).unwrap();
        let dp = cube_sum_baseb_dp(b, s, k, &t, Truncation::Inclusive).unwrap();
        prop_assert!((naive.value - dp.value).norm() <= 1e-9);
    }

    #[test]
    fn base_degeneracy(b in 3u32..6, k in 1usize..8) {
        // s_b(n) ≡ n mod (b − 1), and for s ≥ 2 the linear forms cancel
        let v = cube_sum_baseb_dp(b, 2, k, &Frequency::ratio(1, b as u64 - 1), Truncation::Inclusive).unwrap();
        prop_assert!((v.modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_pairs_separate(
        which in 0usize..3,
        s in 1usize..=2,
        mu in 0usize..3,
        seed in any::<u64>(),
    ) {
        let sys = vec![NumerationSystem::zeckendorf(), NumerationSystem::tribonacci(), NumerationSystem::base(2).unwrap()]
            .swap_remove(which);
        let d = sys.degree();
        let r = match estimate_carry_radius(&sys, 5, sys.g(12), Execution::Sequential).unwrap().r_add {
            Radius::Finite(r) => r + d,
            Radius::Unbounded => unreachable!(),
        };
        let patterns = admissible_patterns(&sys);
        let side = sys.g(mu + 1);
        let n: Vec<u64> = (0..=s as u64).map(|i| (seed >> (8 * i)) % side).collect();
        let windows: Vec<_> = (0..=s).map(|i| patterns[(seed >> (32 + 4 * i)) as usize % patterns.len()].clone()).collect();
        let a = build_cancellation_pair(&sys, s, mu, r, &n, &windows, PairLayout::default()).unwrap();
        for v in [&a.first, &a.second] {
            prop_assert!(check_carry_separation(&sys, v, mu + 1, r).unwrap().holds);
        }
    }
}

#[test]
fn savings_inequality_on_grid() {
    for j in 0..10_000 {
        let x = j as f64 / 10_000.0;
        let (lhs, rhs) = cosine_savings(x, 1);
        assert!(lhs <= rhs + 1e-12, "x = {x}");
    }
}
