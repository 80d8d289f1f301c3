mod common;

use common::{paper_profile, pmf_by_enumeration};
use hetsense::occupancy::*;
use hetsense::sensing::{epsilon_for_noise, sensing_noise};
use hetsense::signal::NoiseModel;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn profile_strategy(max_n: usize) -> impl Strategy<Value = OccupancyProfile> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_n).prop_flat_map(|p| {
        let n = p.len();
        (Just(p), 1..=n).prop_map(move |(p, g)| {
            // g blocks of near-equal size
            let mut sizes = vec![n / g; g];
            for s in sizes.iter_mut().take(n % g) {
                *s += 1;
            }
            OccupancyProfile::new(BlockPartition::new(n, sizes).unwrap(), p).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pmf_matches_subset_enumeration(profile in profile_strategy(12)) {
        let dp = occupancy_pmf(&profile);
        let brute = pmf_by_enumeration(profile.band_prob());
        prop_assert_eq!(dp.len(), brute.len());
        for (a, b) in dp.iter().zip(&brute) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn bound_never_exceeds_the_exact_tail(profile in profile_strategy(120)) {
        let mu = profile.mean_occupied();
        prop_assume!(mu > 0.0);
        let pmf = occupancy_pmf(&profile);
        let n = profile.partition().total_bands();
        for k0 in (mu.floor() as usize + 1)..=n {
            let bound = tail_lower_bound(&profile, k0).unwrap();
            // the Chernoff argument bounds Pr(X < k0), which implies Pr(X ≤ k0)
            let strictly_below: f64 = pmf[..k0].iter().sum();
            prop_assert!(bound <= exact_tail(&pmf, k0) + 1e-12);
            prop_assert!(bound <= strictly_below + 1e-12, "k0 {} bound {} tail {}", k0, bound, strictly_below);
        }
    }

    #[test]
    fn bound_is_nondecreasing_above_the_mean(profile in profile_strategy(200)) {
        let mu = profile.mean_occupied();
        prop_assume!(mu > 0.0);
        let n = profile.partition().total_bands();
        let mut prev = 0.0;
        for k0 in (mu.ceil() as usize).max(1)..=n {
            let b = tail_lower_bound(&profile, k0).unwrap();
            prop_assert!(b >= prev, "k0 {}: {} < {}", k0, b, prev);
            prev = b;
        }
    }

    #[test]
    fn selected_level_is_minimal(profile in profile_strategy(200), alpha in 0.001f64..0.999) {
        let mu = profile.mean_occupied();
        prop_assume!(mu > 0.0);
        match select_sparsity_level(&profile, alpha) {
            Ok(k0) => {
                prop_assert!(k0 as f64 > mu);
                prop_assert!(tail_lower_bound(&profile, k0).unwrap() >= 1.0 - alpha);
                if (k0 - 1) as f64 > mu {
                    prop_assert!(tail_lower_bound(&profile, k0 - 1).unwrap() < 1.0 - alpha);
                }
            }
            Err(e) => {
                let not_found = matches!(e, hetsense::Error::SparsityLevelNotFound { .. });
                prop_assert!(not_found);
            }
        }
    }

    #[test]
    fn block_averages_add_up(profile in profile_strategy(200)) {
        let total: f64 = block_averages(&profile).iter().sum();
        let direct: f64 = profile.band_prob().iter().sum();
        // equal up to summation order
        prop_assert!((total - direct).abs() <= 1e-12 * direct.max(1.0));
        prop_assert!((profile.mean_occupied() - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}

#[test]
fn pmf_sums_to_one_at_full_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut profiles = vec![paper_profile()];
    for _ in 0..20 {
        let p: Vec<f64> = (0..256).map(|_| rng.random::<f64>()).collect();
        profiles.push(OccupancyProfile::new(BlockPartition::uniform(256, 8).unwrap(), p).unwrap());
    }
    for profile in &profiles {
        let pmf = occupancy_pmf(profile);
        assert_eq!(pmf.len(), 257);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pmf.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn inversion_probability_matches_monte_carlo() {
    let exact = block_inversion_probability(64, 0.1, 64, 0.01);
    assert!(exact < 0.02);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let draws = 100_000;
    let count = |n: usize, q: f64, rng: &mut ChaCha8Rng| (0..n).filter(|_| rng.random::<f64>() < q).count();
    let hits = (0..draws)
        .filter(|_| {
            let a = count(64, 0.1, &mut rng);
            let b = count(64, 0.01, &mut rng);
            b > a
        })
        .count();
    let p_hat = hits as f64 / draws as f64;
    let se = (exact * (1.0 - exact) / draws as f64).sqrt();
    assert!((p_hat - exact).abs() < 3.0 * se, "exact {exact}, estimate {p_hat}, se {se}");
}

#[test]
fn inversion_probability_with_unequal_blocks() {
    // the truncated double sum is the full probability whenever n2 ≤ n1
    let (n1, q1, n2, q2) = (12, 0.3, 7, 0.4);
    let a = pmf_by_enumeration(&vec![q1; n1]);
    let b = pmf_by_enumeration(&vec![q2; n2]);
    let mut direct = 0.0;
    for (k2, pb) in b.iter().enumerate() {
        for pa in a.iter().take(k2) {
            direct += pa * pb;
        }
    }
    assert!((block_inversion_probability(n1, q1, n2, q2) - direct).abs() < 1e-12);
}

#[test]
fn noise_energy_and_epsilon_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let (m, n) = (27, 256);
    let sys = common::system(m, n, &mut rng);
    let noise = NoiseModel::new(0.3).unwrap();
    let draws = 10_000;
    let mean = (0..draws).map(|_| sensing_noise(&sys, noise, &mut rng).norm_squared()).sum::<f64>() / draws as f64;
    assert!((mean / (n as f64 * 0.3) - 1.0).abs() < 0.02, "{mean}");

    let eps = epsilon_for_noise(&sys, noise, 0.95, 2000, &mut rng).unwrap();
    let fresh = 4000;
    let covered = (0..fresh).filter(|_| sensing_noise(&sys, noise, &mut rng).norm() <= eps).count();
    let rate = covered as f64 / fresh as f64;
    assert!((rate - 0.95).abs() <= 0.02, "{rate}");
}
