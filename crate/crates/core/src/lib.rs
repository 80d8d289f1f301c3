//! Weighted ℓ1 compressive spectrum sensing for wideband spectrum whose
//! occupancy is heterogeneous across contiguous blocks of bands.
//!
//! The crate is organised along the processing chain:
//!
//! - [`occupancy`]: block partitions, per-band occupancy probabilities and
//!   the counting statistics used to size the measurement system.
//! - [`signal`]: frequency-domain PU signal synthesis, time-domain noise and
//!   the unitary DFT pair.
//! - [`sensing`]: Bernoulli sensing matrices and noisy compressed measurements.
//! - [`recovery`]: block-weighted ℓ1 recovery plus unweighted ℓ1, OMP and
//!   CoSaMP baselines.
//! - [`detection`]: energy detection on recovered spectra and Pd/Pf scoring.
//! - [`harness`]: configuration-driven Monte-Carlo experiments and CSV output.

pub mod detection;
pub mod error;
pub mod harness;
pub mod occupancy;
pub mod recovery;
pub mod sensing;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex column vector used for spectra and measurements.
pub type CVector = nalgebra::DVector<Complex64>;
