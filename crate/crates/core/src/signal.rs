//! Frequency-domain PU signals, time-domain noise and the unitary DFT pair.
//!
//! Channel gains are not modelled separately; they are folded into the random
//! per-band magnitudes. Each band carries exactly one coefficient.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::occupancy::OccupancyRealization;
use crate::{CVector, Complex64, Error, Result};

/// Frequency-domain spectrum, one complex coefficient per band.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector {
    values: CVector,
}

impl SpectrumVector {
    pub fn new(values: CVector) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(CVector::zeros(n))
    }

    pub fn values(&self) -> &CVector {
        &self.values
    }

    pub fn into_values(self) -> CVector {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Time-domain AWGN variance σ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!(
                "noise variance must be finite and nonnegative, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn noiseless() -> Self {
        Self { sigma2: 0.0 }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// Closed interval `[lo, hi]` of signal magnitudes on occupied bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeRange {
    lo: f64,
    hi: f64,
}

impl MagnitudeRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "magnitude range needs 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Draws `ρ·e^{iθ}` on every occupied band, with `ρ` uniform on the range and
/// `θ` uniform on `[0, 2π)`. Vacant bands are exactly zero.
pub fn synthesize_spectrum<R: Rng + ?Sized>(
    realization: &OccupancyRealization,
    range: MagnitudeRange,
    rng: &mut R,
) -> SpectrumVector {
    let values = realization
        .occupied()
        .iter()
        .map(|&occupied| {
            if !occupied {
                return Complex64::new(0.0, 0.0);
            }
            let rho = if range.lo == range.hi {
                range.lo
            } else {
                rng.random_range(range.lo..=range.hi)
            };
            let theta = rng.random_range(0.0..TAU);
            Complex64::from_polar(rho, theta)
        })
        .collect::<Vec<_>>();
    SpectrumVector::new(CVector::from_vec(values))
}

fn unitary_transform(v: &CVector, inverse: bool) -> CVector {
    let n = v.len();
    if n == 0 {
        return v.clone();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut buf: Vec<Complex64> = v.iter().copied().collect();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    CVector::from_iterator(n, buf.into_iter().map(|c| c * scale))
}

/// Unitary forward DFT, `X_k = n^{-1/2} Σ_j x_j e^{-2πi jk/n}`.
pub fn dft(v: &CVector) -> CVector {
    unitary_transform(v, false)
}

/// Unitary inverse DFT.
pub fn idft(v: &CVector) -> CVector {
    unitary_transform(v, true)
}

/// Circularly-symmetric complex Gaussian noise, variance σ² per entry.
pub fn sample_time_noise<R: Rng + ?Sized>(n: usize, noise: NoiseModel, rng: &mut R) -> CVector {
    if noise.sigma2 == 0.0 {
        return CVector::zeros(n);
    }
    let scale = noise.sigma2.sqrt() * FRAC_1_SQRT_2;
    CVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}
