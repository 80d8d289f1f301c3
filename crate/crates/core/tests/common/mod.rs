//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use hetsense::occupancy::{BlockPartition, OccupancyProfile};
use hetsense::recovery::WeightVector;
use hetsense::sensing::{generate_sensing_matrix, SensingSystem};
use hetsense::{CVector, Complex64};
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;

pub fn paper_profile() -> OccupancyProfile {
    OccupancyProfile::from_block_probs(BlockPartition::uniform(256, 4).unwrap(), &[0.1, 0.01, 0.1, 0.01]).unwrap()
}

/// Count distribution by summing over every subset of occupied bands.
pub fn pmf_by_enumeration(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut pmf = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let mut prob = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        pmf[mask.count_ones() as usize] += prob;
    }
    pmf
}

/// Sylvester Hadamard matrix of order `n` (a power of two), scaled to be
/// orthogonal; entries are `±1/√n`.
pub fn hadamard(n: usize) -> DMatrix<f64> {
    assert!(n.is_power_of_two());
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < n {
        let k = h.nrows();
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    h / (n as f64).sqrt()
}

/// `k`-sparse complex vector on a uniformly random support with moduli in
/// `[0.5, 2]` and uniform phases.
pub fn random_sparse<R: Rng>(n: usize, k: usize, rng: &mut R) -> CVector {
    let mut x = CVector::zeros(n);
    for i in sample(rng, n, k) {
        x[i] = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
    }
    x
}

pub fn random_sparse_on<R: Rng>(n: usize, support: &[usize], rng: &mut R) -> CVector {
    let mut x = CVector::zeros(n);
    for &i in support {
        x[i] = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
    }
    x
}

pub fn system<R: Rng>(m: usize, n: usize, rng: &mut R) -> SensingSystem {
    generate_sensing_matrix(m, n, rng).unwrap()
}

pub fn weighted_objective(weights: &WeightVector, partition: &BlockPartition, x: &CVector) -> f64 {
    let per_band = weights.expand(partition).unwrap();
    x.iter().zip(&per_band).map(|(c, w)| w * c.norm()).sum()
}
