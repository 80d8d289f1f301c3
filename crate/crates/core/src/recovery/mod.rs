//! Sparse spectrum recovery from compressed measurements.
//!
//! The block-weighted ℓ1 program is the main solver; unweighted ℓ1, OMP and
//! CoSaMP are kept as baselines. All solvers return a [`RecoveryResult`].

mod greedy;
mod l1;
mod metrics;
mod weights;

pub use greedy::{solve_cosamp, solve_omp};
pub use l1::{solve_l1, solve_weighted_l1};
pub use metrics::{recovery_error, sparsity_index};
pub use weights::{compute_weights, compute_weights_floored, WeightVector, MIN_BLOCK_AVERAGE};

use crate::sensing::SensingSystem;
use crate::{CVector, Error, Result};

/// Tuning for the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub primal_tolerance: f64,
    pub dual_tolerance: f64,
    /// Initial splitting penalty; adapted during the iteration.
    pub penalty: f64,
    /// Relative slack allowed on the residual constraint.
    pub feasibility_slack: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            primal_tolerance: 1e-6,
            dual_tolerance: 1e-6,
            penalty: 1.0,
            feasibility_slack: 1e-3,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        for (name, v) in [
            ("primal_tolerance", self.primal_tolerance),
            ("dual_tolerance", self.dual_tolerance),
            ("penalty", self.penalty),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.feasibility_slack >= 0.0) {
            return Err(Error::Domain(format!(
                "feasibility_slack must be nonnegative, got {}",
                self.feasibility_slack
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryStatus {
    Converged,
    MaxIterations,
    /// Numerical breakdown; the estimate should not be trusted.
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub x_hat: CVector,
    /// `‖A x̂ − y‖₂`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: RecoveryStatus,
}

impl RecoveryResult {
    pub(crate) fn new(system: &SensingSystem, y: &CVector, x_hat: CVector, iterations: usize, status: RecoveryStatus) -> Self {
        let residual_norm = (system.apply(&x_hat) - y).norm();
        let status = if x_hat.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            status
        } else {
            RecoveryStatus::Infeasible
        };
        Self {
            x_hat,
            residual_norm,
            iterations,
            status,
        }
    }
}

fn check_measurements(system: &SensingSystem, y: &CVector) -> Result<()> {
    if y.len() != system.measurements() {
        return Err(Error::Dimension(format!(
            "measurement vector has length {}, system expects {}",
            y.len(),
            system.measurements()
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be finite and nonnegative, got {epsilon}")));
    }
    Ok(())
}
