//! Weighted ℓ1 minimisation over a residual ball,
//!
//! ```text
//! minimize  Σ_i w_i |x_i|   subject to  ‖A x − y‖₂ ≤ ε
//! ```
//!
//! solved by ADMM on the splitting `x = z`, with the weighted ℓ1 term on `x`
//! and the indicator of the residual ball on `z`. The projection onto the
//! ball is exact: with `A Aᴴ = U Λ Uᵀ` it reduces to a scalar root find for
//! the multiplier `t` in `x = v − Aᴴ U diag(t / (1 + tλ)) Uᵀ (A v − y)`.

use nalgebra::DMatrix;

use super::{check_epsilon, check_measurements, RecoveryResult, RecoveryStatus, SolverOptions, WeightVector};
use crate::occupancy::BlockPartition;
use crate::sensing::SensingSystem;
use crate::{CVector, Complex64, Error, Result};

/// Relative size below which a coefficient is dropped from the polish support.
const SUPPORT_THRESHOLD: f64 = 1e-8;
/// Residual accepted from the least-squares polish when `ε = 0`.
const EXACT_RESIDUAL: f64 = 1e-9;

const ADAPT_EVERY: usize = 10;
const BALANCE_RATIO: f64 = 10.0;
const PENALTY_STEP: f64 = 2.0;

/// Solves the block-weighted program; every band in block `l` carries `ω_l`.
pub fn solve_weighted_l1(
    system: &SensingSystem,
    y: &CVector,
    weights: &WeightVector,
    partition: &BlockPartition,
    epsilon: f64,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    if partition.total_bands() != system.bands() {
        return Err(Error::Dimension(format!(
            "partition covers {} bands, system has {}",
            partition.total_bands(),
            system.bands()
        )));
    }
    let band_weights = weights.expand(partition)?;
    solve_band_weighted(system, y, &band_weights, epsilon, opts)
}

/// Unweighted ℓ1 recovery (basis pursuit denoising).
pub fn solve_l1(system: &SensingSystem, y: &CVector, epsilon: f64, opts: &SolverOptions) -> Result<RecoveryResult> {
    solve_band_weighted(system, y, &vec![1.0; system.bands()], epsilon, opts)
}

pub(crate) fn solve_band_weighted(
    system: &SensingSystem,
    y: &CVector,
    band_weights: &[f64],
    epsilon: f64,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    check_measurements(system, y)?;
    check_epsilon(epsilon)?;
    opts.validate()?;
    let n = system.bands();
    if band_weights.len() != n {
        return Err(Error::Dimension(format!("{} weights for {n} bands", band_weights.len())));
    }

    if y.norm() <= epsilon {
        return Ok(RecoveryResult::new(system, y, CVector::zeros(n), 0, RecoveryStatus::Converged));
    }

    // The minimiser does not depend on the overall weight scale; fixing the
    // mean at one makes the penalty comparable across weightings.
    let mean = band_weights.iter().sum::<f64>() / n as f64;
    let weights: Vec<f64> = band_weights.iter().map(|w| w / mean).collect();

    let projector = BallProjector::new(system, y, epsilon);
    let mut rho = opts.penalty;
    let mut x = CVector::zeros(n);
    let mut z = projector.project(&x);
    let mut u = CVector::zeros(n);
    let mut status = RecoveryStatus::MaxIterations;
    let mut iterations = 0;

    for k in 1..=opts.max_iterations {
        iterations = k;
        let v = &z - &u;
        x = soft_threshold(&v, &weights, 1.0 / rho);
        let z_prev = std::mem::replace(&mut z, projector.project(&(&x + &u)));
        u += &x - &z;

        let primal = (&x - &z).norm();
        let dual = rho * (&z - &z_prev).norm();
        if !primal.is_finite() || !dual.is_finite() {
            status = RecoveryStatus::Infeasible;
            break;
        }
        let scale = x.norm().max(z.norm());
        if primal <= opts.primal_tolerance * scale && dual <= opts.dual_tolerance * (rho * u.norm()).max(f64::MIN_POSITIVE) {
            status = RecoveryStatus::Converged;
            break;
        }

        if k % ADAPT_EVERY == 0 && k <= opts.max_iterations / 2 {
            if primal > BALANCE_RATIO * dual {
                rho *= PENALTY_STEP;
                u /= Complex64::new(PENALTY_STEP, 0.0);
            } else if dual > BALANCE_RATIO * primal {
                rho /= PENALTY_STEP;
                u *= Complex64::new(PENALTY_STEP, 0.0);
            }
        }
    }

    if status == RecoveryStatus::Infeasible {
        return Ok(RecoveryResult::new(system, y, x, iterations, status));
    }

    let x_hat = if epsilon == 0.0 {
        polish_on_support(system, y, &x).unwrap_or(z)
    } else {
        let residual = (system.apply(&x) - y).norm();
        if residual <= epsilon * (1.0 + opts.feasibility_slack) {
            x
        } else {
            z
        }
    };
    Ok(RecoveryResult::new(system, y, x_hat, iterations, status))
}

/// Modulus shrinkage per coefficient, phase preserved.
fn soft_threshold(v: &CVector, weights: &[f64], scale: f64) -> CVector {
    CVector::from_iterator(
        v.len(),
        v.iter().zip(weights).map(|(c, w)| {
            let modulus = c.norm();
            let tau = w * scale;
            if modulus <= tau {
                Complex64::new(0.0, 0.0)
            } else {
                c * ((modulus - tau) / modulus)
            }
        }),
    )
}

/// Least-squares refit on the support of `x`; only kept when it reproduces
/// the measurements.
fn polish_on_support(system: &SensingSystem, y: &CVector, x: &CVector) -> Option<CVector> {
    let peak = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i].norm() > SUPPORT_THRESHOLD * peak).collect();
    if support.len() > system.measurements() {
        return None;
    }
    let coeffs = least_squares(system.operator(), &support, y)?;
    let mut polished = CVector::zeros(x.len());
    for (&i, c) in support.iter().zip(coeffs.iter()) {
        polished[i] = *c;
    }
    let residual = (system.apply(&polished) - y).norm();
    (residual <= EXACT_RESIDUAL * y.norm().max(1.0)).then_some(polished)
}

/// Minimum-norm least-squares coefficients of `y` on the given columns.
pub(crate) fn least_squares(operator: &DMatrix<Complex64>, columns: &[usize], y: &CVector) -> Option<CVector> {
    if columns.is_empty() {
        return Some(CVector::zeros(0));
    }
    let sub = operator.select_columns(columns);
    let svd = sub.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    svd.solve(y, cutoff).ok()
}

/// Exact Euclidean projection onto `{x : ‖A x − y‖₂ ≤ ε}`.
struct BallProjector<'a> {
    system: &'a SensingSystem,
    y: &'a CVector,
    epsilon: f64,
}

impl<'a> BallProjector<'a> {
    fn new(system: &'a SensingSystem, y: &'a CVector, epsilon: f64) -> Self {
        Self { system, y, epsilon }
    }

    fn project(&self, v: &CVector) -> CVector {
        let r = self.system.apply(v) - self.y;
        if r.norm() <= self.epsilon {
            return v.clone();
        }
        let basis = self.system.gram_vectors();
        let lambda = self.system.gram_values();
        let m = r.len();
        // b = Uᵀ r
        let b: Vec<Complex64> = (0..m)
            .map(|i| (0..m).map(|j| r[j] * basis[(j, i)]).sum())
            .collect();
        let beta: Vec<f64> = b.iter().map(|c| c.norm_sqr()).collect();

        let gains: Vec<f64> = if self.epsilon == 0.0 {
            lambda.iter().map(|l| 1.0 / l).collect()
        } else {
            let t = ball_multiplier(&beta, lambda.as_slice(), self.epsilon);
            lambda.iter().map(|l| t / (1.0 + t * l)).collect()
        };
        let coeffs = CVector::from_iterator(m, b.iter().zip(&gains).map(|(c, g)| c * *g));
        v - self.system.adjoint_basis() * coeffs
    }
}

/// Root `t > 0` of `Σ β_i / (1 + t λ_i)² = ε²`, assuming the left side
/// exceeds `ε²` at `t = 0`.
fn ball_multiplier(beta: &[f64], lambda: &[f64], epsilon: f64) -> f64 {
    let radius = |t: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for (b, l) in beta.iter().zip(lambda) {
            let d = 1.0 + t * l;
            s += b / (d * d);
            ds -= 2.0 * b * l / (d * d * d);
        }
        (s, ds)
    };
    let total: f64 = beta.iter().sum();
    let lambda_min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    let mut hi = (total.sqrt() / epsilon - 1.0) / lambda_min;
    let mut t = 0.0;
    // Newton on 1/‖r(t)‖ − 1/ε, which is close to linear in t.
    for _ in 0..200 {
        let (s, ds) = radius(t);
        let norm = s.sqrt();
        let phi = 1.0 / norm - 1.0 / epsilon;
        if (norm - epsilon).abs() <= 1e-13 * epsilon {
            break;
        }
        if phi < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let dphi = -0.5 * ds / (s * norm);
        let mut next = t - phi / dphi;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == t {
            break;
        }
        t = next;
    }
    t
}
