//! Per-trial random streams.
//!
//! Each trial gets its own ChaCha stream keyed by
//! `SHA-256(master_seed ‖ experiment_id ‖ trial_index)`, so results do not
//! depend on how trials are scheduled across workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn trial_seed(master_seed: u64, experiment_id: &str, trial_index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((experiment_id.len() as u64).to_le_bytes());
    h.update(experiment_id.as_bytes());
    h.update(trial_index.to_le_bytes());
    h.finalize().into()
}

pub fn trial_rng(master_seed: u64, experiment_id: &str, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(trial_seed(master_seed, experiment_id, trial_index))
}
