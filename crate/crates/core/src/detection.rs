//! Energy detection on recovered spectra.
//!
//! A band is declared occupied when its recovered energy `|x̂_i|²` reaches
//! the threshold
//!
//! ```text
//! λ = (E‖η‖² / m) · (1 + Q⁻¹(P_f) / √(n/2))
//! ```
//!
//! and decisions are scored against the true band states.

use statrs::function::erf::erfc;

use crate::occupancy::OccupancyRealization;
use crate::{CVector, Error, Result};

/// Standard normal upper tail `Q(z) = ½ erfc(z / √2)`.
pub fn q_function(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `z` with `Q(z) = p`, by bisection on the monotone upper tail.
pub fn inverse_q(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("Q⁻¹ needs p in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        // Q is decreasing
        if q_function(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn detection_threshold(noise_energy_mean: f64, m: usize, n: usize, pf_target: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain(format!("threshold needs m, n >= 1, got m = {m}, n = {n}")));
    }
    if !(noise_energy_mean >= 0.0) || !noise_energy_mean.is_finite() {
        return Err(Error::Domain(format!(
            "mean noise energy must be finite and nonnegative, got {noise_energy_mean}"
        )));
    }
    let z = inverse_q(pf_target)?;
    Ok(noise_energy_mean / m as f64 * (1.0 + z / (n as f64 / 2.0).sqrt()))
}

/// `true` where `|x̂_i|² ≥ λ`.
pub fn decide_bands(x_hat: &CVector, lambda: f64) -> Vec<bool> {
    x_hat.iter().map(|c| c.norm_sqr() >= lambda).collect()
}

/// Empirical detection and false-alarm rates of one set of decisions.
/// A rate is `None` when its denominator (occupied or vacant bands) is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRates {
    pub pd: Option<f64>,
    pub pf: Option<f64>,
}

pub fn evaluate_detection(decisions: &[bool], truth: &OccupancyRealization) -> Result<DetectionRates> {
    if decisions.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "{} decisions for {} bands",
            decisions.len(),
            truth.len()
        )));
    }
    let (mut hits, mut occupied, mut false_alarms, mut vacant) = (0usize, 0usize, 0usize, 0usize);
    for (&d, &t) in decisions.iter().zip(truth.occupied()) {
        if t {
            occupied += 1;
            hits += d as usize;
        } else {
            vacant += 1;
            false_alarms += d as usize;
        }
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(DetectionRates {
        pd: ratio(hits, occupied),
        pf: ratio(false_alarms, vacant),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub threshold: f64,
    pub decisions: Vec<bool>,
    pub pd: Option<f64>,
    pub pf: Option<f64>,
}

/// Thresholds `x_hat` at `lambda` and scores the result.
pub fn detect(x_hat: &CVector, truth: &OccupancyRealization, lambda: f64) -> Result<DetectionReport> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("threshold must be nonnegative, got {lambda}")));
    }
    let decisions = decide_bands(x_hat, lambda);
    let rates = evaluate_detection(&decisions, truth)?;
    Ok(DetectionReport {
        threshold: lambda,
        decisions,
        pd: rates.pd,
        pf: rates.pf,
    })
}
