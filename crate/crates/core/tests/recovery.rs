mod common;

use common::{hadamard, random_sparse, random_sparse_on, system, weighted_objective};
use hetsense::occupancy::BlockPartition;
use hetsense::recovery::*;
use hetsense::sensing::SensingSystem;
use hetsense::{CVector, Complex64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn noisy(y: &CVector, scale: f64, rng: &mut ChaCha8Rng) -> CVector {
    y + CVector::from_fn(y.len(), |_, _| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
}

fn assert_feasible(r: &RecoveryResult, y_norm: f64, epsilon: f64, opts: &SolverOptions) {
    if r.status != RecoveryStatus::Converged {
        return;
    }
    if epsilon > 0.0 {
        assert!(r.residual_norm <= epsilon * (1.0 + opts.feasibility_slack), "{} > {}", r.residual_norm, epsilon);
    } else {
        assert!(r.residual_norm <= 1e-9 * y_norm.max(1.0), "{}", r.residual_norm);
    }
}

#[test]
fn noiseless_exact_recovery() {
    let opts = SolverOptions::default();
    let partition = BlockPartition::uniform(64, 4).unwrap();
    let uniform = WeightVector::uniform(4).unwrap();
    let (mut weighted, mut plain, mut cosamp) = (0, 0, 0);
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let sys = system(32, 64, &mut rng);
        let x0 = random_sparse(64, 5, &mut rng);
        let y = sys.apply(&x0);
        let rw = solve_weighted_l1(&sys, &y, &uniform, &partition, 0.0, &opts).unwrap();
        let rl = solve_l1(&sys, &y, 0.0, &opts).unwrap();
        let rc = solve_cosamp(&sys, &y, 5, 0.0, &opts).unwrap();
        for r in [&rw, &rl, &rc] {
            assert_feasible(r, y.norm(), 0.0, &opts);
        }
        weighted += (recovery_error(&rw.x_hat, &x0).unwrap() < 1e-4) as usize;
        plain += (recovery_error(&rl.x_hat, &x0).unwrap() < 1e-4) as usize;
        cosamp += (recovery_error(&rc.x_hat, &x0).unwrap() < 1e-4) as usize;
    }
    assert!(weighted >= 95, "weighted {weighted}/100");
    assert!(plain >= 95, "l1 {plain}/100");
    assert!(cosamp >= 95, "cosamp {cosamp}/100");
}

#[test]
fn uniform_weights_reduce_to_plain_l1() {
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in [1, 2, 4, 8] {
        let sys = system(24, 64, &mut rng);
        let x0 = random_sparse(64, 4, &mut rng);
        let y = noisy(&sys.apply(&x0), 0.05, &mut rng);
        let eps = 0.1;
        let partition = BlockPartition::uniform(64, g).unwrap();
        let a = solve_weighted_l1(&sys, &y, &WeightVector::uniform(g).unwrap(), &partition, eps, &opts).unwrap();
        let b = solve_l1(&sys, &y, eps, &opts).unwrap();
        assert!((&a.x_hat - &b.x_hat).norm() < 1e-8);
    }
}

#[test]
fn optimum_never_exceeds_the_truth_objective() {
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..40 {
        let n = 8;
        let m = if trial % 2 == 0 { n } else { 5 };
        let sys = system(m, n, &mut rng);
        let partition = BlockPartition::new(n, vec![3, 5]).unwrap();
        let weights = WeightVector::from_raw(&[rng.random_range(0.1..1.0), rng.random_range(0.1..1.0)]).unwrap();
        let x0 = random_sparse(n, 1 + trial % 4, &mut rng);
        let y = sys.apply(&x0);
        let r = solve_weighted_l1(&sys, &y, &weights, &partition, 0.0, &opts).unwrap();
        let got = weighted_objective(&weights, &partition, &r.x_hat);
        let truth = weighted_objective(&weights, &partition, &x0);
        assert!(got <= truth + 1e-6, "trial {trial}: {got} > {truth}");
        assert_feasible(&r, y.norm(), 0.0, &opts);
    }
}

/// Supports of size ≤ `k` whose least-squares fit reproduces `y` exactly.
fn exact_supports(sys: &SensingSystem, y: &CVector, k: usize) -> Vec<Vec<usize>> {
    let n = sys.bands();
    let mut found = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let cols = DMatrix::from_fn(sys.measurements(), support.len(), |r, c| sys.operator()[(r, support[c])]);
        let fit = cols.clone().svd(true, true).solve(y, 1e-12).unwrap();
        if (cols * fit - y).norm() < 1e-9 * y.norm() {
            found.push(support);
        }
    }
    found
}

#[test]
fn two_block_toy_stays_in_the_favoured_block() {
    let opts = SolverOptions::default();
    let partition = BlockPartition::new(8, vec![4, 4]).unwrap();
    let weights = WeightVector::from_raw(&[0.9, 0.1]).unwrap();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let sys = system(4, 8, &mut rng);
        let band = 4 + (seed as usize % 4);
        let x0 = random_sparse_on(8, &[band], &mut rng);
        let y = sys.apply(&x0);
        // oracle: the truth is the only exact 1-sparse explanation
        assert_eq!(exact_supports(&sys, &y, 1), vec![vec![band]]);
        let r = solve_weighted_l1(&sys, &y, &weights, &partition, 0.0, &opts).unwrap();
        assert!(recovery_error(&r.x_hat, &x0).unwrap() < 1e-4, "seed {seed}");
        assert!(r.x_hat.iter().take(4).all(|c| c.norm() < 1e-6), "seed {seed}");
    }
}

#[test]
fn dense_second_block_candidate_costs_more() {
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let partition = BlockPartition::new(16, vec![8, 8]).unwrap();
    // block 1 is busier, so block 2 carries the larger weight
    let weights = compute_weights(&[2.0, 0.2]).unwrap();
    for _ in 0..10 {
        let sys = system(6, 16, &mut rng);
        let x0 = random_sparse_on(16, &[1, 5], &mut rng);
        let y = sys.apply(&x0);
        let r = solve_weighted_l1(&sys, &y, &weights, &partition, 0.0, &opts).unwrap();

        // minimum-norm solution using only block-2 columns: feasible and dense
        let a2 = sys.operator().columns(8, 8).into_owned();
        let x2 = a2.clone().svd(true, true).solve(&y, 1e-12).unwrap();
        let mut candidate = CVector::zeros(16);
        candidate.rows_mut(8, 8).copy_from(&x2);
        assert!((sys.apply(&candidate) - &y).norm() < 1e-9 * y.norm());
        assert!(candidate.rows(8, 8).iter().all(|c| c.norm() > 1e-9));

        let solver = weighted_objective(&weights, &partition, &r.x_hat);
        let dense = weighted_objective(&weights, &partition, &candidate);
        assert!(dense > solver, "{dense} <= {solver}");
    }
}

#[test]
fn greedy_methods_are_exact_with_orthonormal_columns() {
    let n = 32;
    let sys = SensingSystem::from_psi(hadamard(n)).unwrap();
    let gram = sys.operator().adjoint() * sys.operator();
    assert!((gram - DMatrix::<Complex64>::identity(n, n)).norm() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in [1, 3, 6, 10] {
        let x0 = random_sparse(n, k, &mut rng);
        let y = sys.apply(&x0);
        let omp = solve_omp(&sys, &y, k, 0.0).unwrap();
        assert_eq!(omp.iterations, k);
        assert!(recovery_error(&omp.x_hat, &x0).unwrap() < 1e-10);
        let cosamp = solve_cosamp(&sys, &y, k, 0.0, &SolverOptions::default()).unwrap();
        assert_eq!(cosamp.iterations, 1);
        assert!(recovery_error(&cosamp.x_hat, &x0).unwrap() < 1e-10);
    }
}

#[test]
fn solvers_are_deterministic() {
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sys = system(20, 64, &mut rng);
    let x0 = random_sparse(64, 4, &mut rng);
    let y = noisy(&sys.apply(&x0), 0.02, &mut rng);
    let partition = BlockPartition::uniform(64, 4).unwrap();
    let w = compute_weights(&[1.0, 0.1, 1.0, 0.1]).unwrap();
    let a = solve_weighted_l1(&sys, &y, &w, &partition, 0.05, &opts).unwrap();
    let b = solve_weighted_l1(&sys, &y, &w, &partition, 0.05, &opts).unwrap();
    assert_eq!(a.x_hat, b.x_hat);
    assert_eq!(a.iterations, b.iterations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn converged_runs_are_feasible(seed in any::<u64>(), k in 1usize..8, noise in 0.0f64..0.3, slack in 1.0f64..3.0) {
        let opts = SolverOptions::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = system(24, 64, &mut rng);
        let x0 = random_sparse(64, k, &mut rng);
        let y = noisy(&sys.apply(&x0), noise, &mut rng);
        let eps = (&y - sys.apply(&x0)).norm() * slack + 1e-3;
        let partition = BlockPartition::uniform(64, 4).unwrap();
        let w = compute_weights(&[rng.random_range(0.1..5.0), rng.random_range(0.1..5.0), 1.0, 2.0]).unwrap();
        for r in [
            solve_weighted_l1(&sys, &y, &w, &partition, eps, &opts).unwrap(),
            solve_l1(&sys, &y, eps, &opts).unwrap(),
        ] {
            prop_assert!(r.status == RecoveryStatus::Converged || r.status == RecoveryStatus::MaxIterations);
            if r.status == RecoveryStatus::Converged {
                prop_assert!(r.residual_norm <= eps * (1.0 + opts.feasibility_slack));
            }
            prop_assert!(((sys.apply(&r.x_hat) - &y).norm() - r.residual_norm).abs() < 1e-9);
        }
    }
}
