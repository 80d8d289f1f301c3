use crate::occupancy::BlockPartition;
use crate::{CVector, Error, Result};

/// Floor applied to block averages by [`compute_weights_floored`].
pub const MIN_BLOCK_AVERAGE: f64 = 1e-6;

/// Positive per-block weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Equal weights `1/g`.
    pub fn uniform(blocks: usize) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::Domain("at least one block is required".into()));
        }
        Ok(Self {
            weights: vec![1.0 / blocks as f64; blocks],
        })
    }

    /// Normalises arbitrary positive weights to unit sum.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Domain("at least one block is required".into()));
        }
        if let Some(w) = raw.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("weights must be positive and finite, got {w}")));
        }
        let total: f64 = raw.iter().sum();
        Ok(Self {
            weights: raw.iter().map(|w| w / total).collect(),
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Repeats each block weight over the bands of its block.
    pub fn expand(&self, partition: &BlockPartition) -> Result<Vec<f64>> {
        if partition.num_blocks() != self.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} blocks",
                self.len(),
                partition.num_blocks()
            )));
        }
        Ok(partition
            .block_sizes()
            .iter()
            .zip(&self.weights)
            .flat_map(|(&size, &w)| std::iter::repeat_n(w, size))
            .collect())
    }

    /// `Σ_l ω_l ‖x_l‖₁` with the modulus as the complex absolute value.
    pub fn objective(&self, partition: &BlockPartition, x: &CVector) -> f64 {
        partition
            .ranges()
            .zip(&self.weights)
            .map(|(r, w)| w * x.rows_range(r).iter().map(|c| c.norm()).sum::<f64>())
            .sum()
    }
}

/// Weights inversely proportional to the block averages,
/// `ω_i = (1/k̄_i) / Σ_j (1/k̄_j)`.
pub fn compute_weights(block_averages: &[f64]) -> Result<WeightVector> {
    if block_averages.is_empty() {
        return Err(Error::Domain("at least one block average is required".into()));
    }
    if let Some(k) = block_averages.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
        return Err(Error::Domain(format!("block averages must be positive, got {k}")));
    }
    let inverse: Vec<f64> = block_averages.iter().map(|k| 1.0 / k).collect();
    WeightVector::from_raw(&inverse)
}

/// [`compute_weights`] with averages below [`MIN_BLOCK_AVERAGE`] raised to it.
pub fn compute_weights_floored(block_averages: &[f64]) -> Result<WeightVector> {
    let floored: Vec<f64> = block_averages.iter().map(|k| k.max(MIN_BLOCK_AVERAGE)).collect();
    compute_weights(&floored)
}
