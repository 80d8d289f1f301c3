//! Greedy baselines: orthogonal matching pursuit and CoSaMP.

use super::l1::least_squares;
use super::{check_epsilon, check_measurements, RecoveryResult, RecoveryStatus, SolverOptions};
use crate::sensing::SensingSystem;
use crate::{CVector, Error, Result};

/// Residuals this far below `‖y‖` count as an exact fit.
const EXACT_FIT: f64 = 1e-12;
/// Relative residual decrease below which CoSaMP is considered stalled.
const STALL: f64 = 1e-12;

fn stop_level(y: &CVector, epsilon: f64) -> f64 {
    epsilon.max(EXACT_FIT * y.norm())
}

fn scatter(n: usize, support: &[usize], coeffs: &CVector) -> CVector {
    let mut x = CVector::zeros(n);
    for (&i, c) in support.iter().zip(coeffs.iter()) {
        x[i] = *c;
    }
    x
}

/// Indices of the `k` largest entries of `values`, ties broken towards the
/// lower index.
fn largest(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order.truncate(k);
    order
}

/// Orthogonal matching pursuit.
///
/// Each step adds the column with the largest normalised correlation
/// `|a_jᴴ r| / ‖a_j‖` with the residual and refits by least squares on the
/// selected support. Stops after `k_max` atoms or once `‖r‖ ≤ ε`.
pub fn solve_omp(system: &SensingSystem, y: &CVector, k_max: usize, epsilon: f64) -> Result<RecoveryResult> {
    check_measurements(system, y)?;
    check_epsilon(epsilon)?;
    let (m, n) = (system.measurements(), system.bands());
    if k_max == 0 || k_max > m {
        return Err(Error::Domain(format!("OMP needs 1 <= k_max <= m = {m}, got {k_max}")));
    }
    let stop = stop_level(y, epsilon);
    let mut x = CVector::zeros(n);
    if y.norm() <= stop {
        return Ok(RecoveryResult::new(system, y, x, 0, RecoveryStatus::Converged));
    }

    let col_norms: Vec<f64> = system.operator().column_iter().map(|c| c.norm()).collect();
    let mut support: Vec<usize> = Vec::with_capacity(k_max);
    let mut selected = vec![false; n];
    let mut residual = y.clone();
    let mut status = RecoveryStatus::MaxIterations;

    for _ in 0..k_max {
        let corr = system.adjoint(&residual);
        let mut best: Option<(usize, f64)> = None;
        for j in (0..n).filter(|&j| !selected[j] && col_norms[j] > 0.0) {
            let score = corr[j].norm() / col_norms[j];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((j, _)) = best else { break };
        support.push(j);
        selected[j] = true;

        let Some(coeffs) = least_squares(system.operator(), &support, y) else {
            status = RecoveryStatus::Infeasible;
            break;
        };
        x = scatter(n, &support, &coeffs);
        residual = y - system.apply(&x);
        if residual.norm() <= stop {
            status = RecoveryStatus::Converged;
            break;
        }
    }
    Ok(RecoveryResult::new(system, y, x, support.len(), status))
}

/// CoSaMP with target sparsity `k`.
///
/// Each iteration merges the `2k` strongest proxy entries `Aᴴ r` with the
/// current support, solves least squares on the merge and keeps the `k`
/// largest coefficients. Halts when `‖r‖ ≤ ε`, when the residual stops
/// decreasing, or after `opts.max_iterations`.
pub fn solve_cosamp(
    system: &SensingSystem,
    y: &CVector,
    k: usize,
    epsilon: f64,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    check_measurements(system, y)?;
    check_epsilon(epsilon)?;
    opts.validate()?;
    let n = system.bands();
    if k == 0 || 3 * k > n {
        return Err(Error::Domain(format!("CoSaMP needs 1 <= k and 3k <= n = {n}, got k = {k}")));
    }
    let stop = stop_level(y, epsilon);
    let mut x = CVector::zeros(n);
    let mut residual_norm = y.norm();
    if residual_norm <= stop {
        return Ok(RecoveryResult::new(system, y, x, 0, RecoveryStatus::Converged));
    }

    let mut residual = y.clone();
    let mut status = RecoveryStatus::MaxIterations;
    let mut iterations = 0;
    for it in 1..=opts.max_iterations {
        iterations = it;
        let proxy: Vec<f64> = system.adjoint(&residual).iter().map(|c| c.norm()).collect();
        let mut merged = largest(&proxy, 2 * k);
        merged.extend((0..n).filter(|&i| x[i].norm() > 0.0));
        merged.sort_unstable();
        merged.dedup();

        let Some(coeffs) = least_squares(system.operator(), &merged, y) else {
            status = RecoveryStatus::Infeasible;
            break;
        };
        let moduli: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
        let keep = largest(&moduli, k);
        let mut candidate = CVector::zeros(n);
        for &p in &keep {
            candidate[merged[p]] = coeffs[p];
        }

        let candidate_residual = y - system.apply(&candidate);
        let candidate_norm = candidate_residual.norm();
        if candidate_norm >= residual_norm * (1.0 - STALL) {
            // no progress; keep the better of the two estimates
            if candidate_norm < residual_norm {
                x = candidate;
            }
            status = RecoveryStatus::Converged;
            break;
        }
        x = candidate;
        residual = candidate_residual;
        residual_norm = candidate_norm;
        if residual_norm <= stop {
            status = RecoveryStatus::Converged;
            break;
        }
    }
    Ok(RecoveryResult::new(system, y, x, iterations, status))
}
