//! Block-structured primary-user occupancy.
//!
//! Each band is occupied independently with its own probability, and bands
//! are grouped into contiguous blocks whose members share similar traffic.
//! The number of occupied bands is Poisson-binomial; its tail is what sizes
//! the sensing system.

use std::ops::Range;

use rand::Rng;

use crate::{Error, Result};

/// Contiguous, disjoint grouping of `total_bands` bands into blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    total_bands: usize,
    block_sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(total_bands: usize, block_sizes: Vec<usize>) -> Result<Self> {
        if total_bands == 0 {
            return Err(Error::Partition("total_bands must be positive".into()));
        }
        if block_sizes.is_empty() {
            return Err(Error::Partition("at least one block is required".into()));
        }
        if let Some(l) = block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::Partition(format!("block {l} is empty")));
        }
        let sum: usize = block_sizes.iter().sum();
        if sum != total_bands {
            return Err(Error::Partition(format!(
                "block sizes sum to {sum}, expected {total_bands}"
            )));
        }
        let offsets = block_sizes
            .iter()
            .scan(0usize, |acc, &s| {
                let start = *acc;
                *acc += s;
                Some(start)
            })
            .collect();
        Ok(Self {
            total_bands,
            block_sizes,
            offsets,
        })
    }

    /// `blocks` equal-size blocks; fails unless `blocks` divides `total_bands`.
    pub fn uniform(total_bands: usize, blocks: usize) -> Result<Self> {
        if blocks == 0 || total_bands % blocks != 0 {
            return Err(Error::Partition(format!(
                "{total_bands} bands cannot be split into {blocks} equal blocks"
            )));
        }
        Self::new(total_bands, vec![total_bands / blocks; blocks])
    }

    /// The whole band as one block.
    pub fn single(total_bands: usize) -> Result<Self> {
        Self::new(total_bands, vec![total_bands])
    }

    pub fn total_bands(&self) -> usize {
        self.total_bands
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Band indices covered by block `l`.
    pub fn range(&self, l: usize) -> Range<usize> {
        self.offsets[l]..self.offsets[l] + self.block_sizes[l]
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.num_blocks()).map(move |l| self.range(l))
    }

    /// Index of the block containing `band`.
    pub fn block_of(&self, band: usize) -> usize {
        debug_assert!(band < self.total_bands);
        self.offsets.partition_point(|&o| o <= band) - 1
    }
}

/// Per-band occupancy probabilities over a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyProfile {
    partition: BlockPartition,
    band_prob: Vec<f64>,
}

impl OccupancyProfile {
    pub fn new(partition: BlockPartition, band_prob: Vec<f64>) -> Result<Self> {
        if band_prob.len() != partition.total_bands() {
            return Err(Error::Profile(format!(
                "{} probabilities for {} bands",
                band_prob.len(),
                partition.total_bands()
            )));
        }
        if let Some(i) = band_prob.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Profile(format!(
                "band {i} has probability {} outside [0, 1]",
                band_prob[i]
            )));
        }
        Ok(Self {
            partition,
            band_prob,
        })
    }

    /// Every band of block `l` gets probability `block_prob[l]`.
    pub fn from_block_probs(partition: BlockPartition, block_prob: &[f64]) -> Result<Self> {
        if block_prob.len() != partition.num_blocks() {
            return Err(Error::Profile(format!(
                "{} block probabilities for {} blocks",
                block_prob.len(),
                partition.num_blocks()
            )));
        }
        let band_prob = partition
            .block_sizes()
            .iter()
            .zip(block_prob)
            .flat_map(|(&size, &p)| std::iter::repeat_n(p, size))
            .collect();
        Self::new(partition, band_prob)
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn band_prob(&self) -> &[f64] {
        &self.band_prob
    }

    /// Expected number of occupied bands over the whole spectrum.
    pub fn mean_occupied(&self) -> f64 {
        self.band_prob.iter().sum()
    }
}

/// One draw of the band states; `true` means occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyRealization {
    occupied: Vec<bool>,
}

impl OccupancyRealization {
    pub fn from_states(occupied: Vec<bool>) -> Self {
        Self { occupied }
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupied
            .iter()
            .enumerate()
            .filter_map(|(i, &o)| o.then_some(i))
    }
}

/// Expected number of occupied bands in each block.
pub fn block_averages(profile: &OccupancyProfile) -> Vec<f64> {
    profile
        .partition()
        .ranges()
        .map(|r| profile.band_prob()[r].iter().sum())
        .collect()
}

pub fn sample_realization<R: Rng + ?Sized>(
    profile: &OccupancyProfile,
    rng: &mut R,
) -> OccupancyRealization {
    let occupied = profile
        .band_prob()
        .iter()
        .map(|&p| rng.random::<f64>() < p)
        .collect();
    OccupancyRealization { occupied }
}

/// Distribution of the number of successes among independent Bernoulli
/// trials with the given probabilities. Entry `k` is `Pr(X = k)`.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        // walk downwards so pmf[k - 1] still holds the previous row
        for k in (1..=i + 1).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// PMF of the number of occupied bands, length `n + 1`.
pub fn occupancy_pmf(profile: &OccupancyProfile) -> Vec<f64> {
    poisson_binomial_pmf(profile.band_prob())
}

/// `Pr(X ≤ k0)` from the exact PMF.
pub fn exact_tail(pmf: &[f64], k0: usize) -> f64 {
    pmf.iter().take(k0 + 1).sum::<f64>().min(1.0)
}

/// Closed-form lower bound on `Pr(X ≤ k0)` for a count with mean `mu`,
/// `1 - e^(k0 - mu) / (k0 / mu)^k0`, clamped to `[0, 1]`.
///
/// `k0` may be real here; at `k0 ≤ mu` the bound carries no information and
/// evaluates to zero.
pub fn tail_bound_closed_form(mu: f64, k0: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "tail bound needs a positive mean occupancy, got {mu}"
        )));
    }
    if !(k0 > 0.0) {
        return Err(Error::Domain(format!("sparsity level must be positive, got {k0}")));
    }
    let log_ratio = k0 - mu - k0 * (k0 / mu).ln();
    Ok((1.0 - log_ratio.exp()).clamp(0.0, 1.0))
}

pub fn tail_lower_bound(profile: &OccupancyProfile, k0: usize) -> Result<f64> {
    tail_bound_closed_form(profile.mean_occupied(), k0 as f64)
}

/// Smallest integer sparsity level above the mean whose tail bound reaches
/// `1 - alpha`.
pub fn select_sparsity_level(profile: &OccupancyProfile, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mu = profile.mean_occupied();
    let n = profile.partition().total_bands();
    let target = 1.0 - alpha;
    let first = mu.floor() as usize + 1;
    for k0 in first..=n {
        if tail_bound_closed_form(mu, k0 as f64)? >= target {
            return Ok(k0);
        }
    }
    Err(Error::SparsityLevelNotFound {
        max_level: n,
        target,
    })
}

/// Number of measurements `max(1, ⌈c · k0 · ln(n / k0)⌉)`.
pub fn measurement_count(k0: usize, n: usize, c: f64) -> Result<usize> {
    if k0 == 0 || k0 >= n {
        return Err(Error::Domain(format!(
            "measurement count needs 1 <= k0 < n, got k0 = {k0}, n = {n}"
        )));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("constant must be positive, got {c}")));
    }
    let m = (c * k0 as f64 * (n as f64 / k0 as f64).ln()).ceil();
    Ok((m as usize).max(1))
}

/// Probability that a block of `n2` bands with per-band probability `q2`
/// holds strictly more occupied bands than a block of `n1` bands with `q1`,
/// summed over counts `1..=min(n1, n2)` of the second block.
///
/// The truncation at `min(n1, n2)` makes this exact whenever `n2 <= n1`.
pub fn block_inversion_probability(n1: usize, q1: f64, n2: usize, q2: f64) -> f64 {
    let first = poisson_binomial_pmf(&vec![q1; n1]);
    let second = poisson_binomial_pmf(&vec![q2; n2]);
    let mut below = 0.0;
    let mut total = 0.0;
    for k in 1..=n1.min(n2) {
        below += first[k - 1];
        total += below * second[k];
    }
    total.clamp(0.0, 1.0)
}
