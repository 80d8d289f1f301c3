//! Bernoulli sensing matrices and compressed, noisy measurements.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::occupancy::OccupancyRealization;
use crate::signal::{idft, sample_time_noise, NoiseModel, SpectrumVector};
use crate::{CVector, Complex64, Error, Result};

/// Below this the sensing matrix is treated as rank deficient.
const MIN_SINGULAR_VALUE: f64 = 1e-8;

/// Redraws allowed when a random draw comes out rank deficient.
const MAX_DRAWS: usize = 64;

/// Real sensing matrix `Ψ` (m × n) together with the complex measurement
/// operator `A = Ψ F⁻¹` and a factorisation of `A Aᴴ = Ψ Ψᵀ`.
#[derive(Debug, Clone)]
pub struct SensingSystem {
    psi: DMatrix<f64>,
    operator: DMatrix<Complex64>,
    // eigenvectors U and eigenvalues of Ψ Ψᵀ, plus Aᴴ U
    gram_vectors: DMatrix<f64>,
    gram_values: DVector<f64>,
    adjoint_basis: DMatrix<Complex64>,
}

impl SensingSystem {
    /// Wraps an arbitrary real matrix with full row rank.
    pub fn from_psi(psi: DMatrix<f64>) -> Result<Self> {
        let (m, n) = psi.shape();
        if m == 0 || m > n {
            return Err(Error::Domain(format!(
                "sensing matrix must satisfy 1 <= m <= n, got {m} x {n}"
            )));
        }
        let gram = &psi * psi.transpose();
        let eigen = SymmetricEigen::new(gram);
        let smallest = eigen.eigenvalues.min().max(0.0).sqrt();
        if !(smallest > MIN_SINGULAR_VALUE) {
            return Err(Error::Domain(format!(
                "sensing matrix is rank deficient (smallest singular value {smallest:e})"
            )));
        }

        // Row i of Ψ F⁻¹ is the inverse DFT of row i of Ψ since F⁻¹ is symmetric.
        let mut operator = DMatrix::<Complex64>::zeros(m, n);
        for i in 0..m {
            let row = CVector::from_iterator(n, psi.row(i).iter().map(|&v| Complex64::new(v, 0.0)));
            operator.row_mut(i).tr_copy_from(&idft(&row));
        }
        let basis_c = eigen.eigenvectors.map(|v| Complex64::new(v, 0.0));
        let adjoint_basis = operator.adjoint() * basis_c;

        Ok(Self {
            psi,
            operator,
            gram_vectors: eigen.eigenvectors,
            gram_values: eigen.eigenvalues,
            adjoint_basis,
        })
    }

    pub fn measurements(&self) -> usize {
        self.psi.nrows()
    }

    pub fn bands(&self) -> usize {
        self.psi.ncols()
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn operator(&self) -> &DMatrix<Complex64> {
        &self.operator
    }

    pub fn min_singular_value(&self) -> f64 {
        self.gram_values.min().max(0.0).sqrt()
    }

    /// `A x`.
    pub fn apply(&self, x: &CVector) -> CVector {
        &self.operator * x
    }

    /// `Aᴴ r`.
    pub fn adjoint(&self, r: &CVector) -> CVector {
        self.operator.ad_mul(r)
    }

    /// `Ψ w` for a complex time-domain vector.
    pub fn apply_psi(&self, w: &CVector) -> CVector {
        let re = &self.psi * w.map(|c| c.re);
        let im = &self.psi * w.map(|c| c.im);
        CVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)))
    }

    pub(crate) fn gram_vectors(&self) -> &DMatrix<f64> {
        &self.gram_vectors
    }

    pub(crate) fn gram_values(&self) -> &DVector<f64> {
        &self.gram_values
    }

    /// `Aᴴ U` for the eigenvectors `U` of `A Aᴴ`.
    pub(crate) fn adjoint_basis(&self) -> &DMatrix<Complex64> {
        &self.adjoint_basis
    }
}

/// Draws an m × n matrix of equiprobable `±1/√m` entries and composes it with
/// the inverse DFT. Rank-deficient draws are discarded and redrawn.
pub fn generate_sensing_matrix<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<SensingSystem> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "sensing matrix needs 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let amp = 1.0 / (m as f64).sqrt();
    let mut last_err = None;
    for _ in 0..MAX_DRAWS {
        let psi = DMatrix::from_fn(m, n, |_, _| if rng.random::<bool>() { amp } else { -amp });
        match SensingSystem::from_psi(psi) {
            Ok(system) => return Ok(system),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one draw"))
}

/// Compressed measurements with the ground truth that produced them.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub y: CVector,
    pub eta: CVector,
    pub truth: SpectrumVector,
    pub realization: OccupancyRealization,
}

fn check_dims(system: &SensingSystem, x0: &SpectrumVector, realization: &OccupancyRealization) -> Result<()> {
    if x0.len() != system.bands() || realization.len() != system.bands() {
        return Err(Error::Dimension(format!(
            "system has {} bands, spectrum {}, realization {}",
            system.bands(),
            x0.len(),
            realization.len()
        )));
    }
    Ok(())
}

/// Sensing noise `η = Ψ w` for a fresh time-domain noise draw `w`.
pub fn sensing_noise<R: Rng + ?Sized>(system: &SensingSystem, noise: NoiseModel, rng: &mut R) -> CVector {
    system.apply_psi(&sample_time_noise(system.bands(), noise, rng))
}

/// `y = A x₀ + η` with a given noise vector.
pub fn measure_with_noise(
    system: &SensingSystem,
    x0: &SpectrumVector,
    realization: &OccupancyRealization,
    eta: CVector,
) -> Result<MeasurementRecord> {
    check_dims(system, x0, realization)?;
    if eta.len() != system.measurements() {
        return Err(Error::Dimension(format!(
            "noise has length {}, expected {}",
            eta.len(),
            system.measurements()
        )));
    }
    let y = system.apply(x0.values()) + &eta;
    Ok(MeasurementRecord {
        y,
        eta,
        truth: x0.clone(),
        realization: realization.clone(),
    })
}

pub fn measure<R: Rng + ?Sized>(
    system: &SensingSystem,
    x0: &SpectrumVector,
    realization: &OccupancyRealization,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    check_dims(system, x0, realization)?;
    let eta = sensing_noise(system, noise, rng);
    measure_with_noise(system, x0, realization, eta)
}

/// `10 log10(‖A x₀‖² / ‖η‖²)`; infinite when the record is noiseless.
pub fn sensing_snr(record: &MeasurementRecord, system: &SensingSystem) -> f64 {
    let noise = record.eta.norm_squared();
    if noise == 0.0 {
        return f64::INFINITY;
    }
    let signal = system.apply(record.truth.values()).norm_squared();
    10.0 * (signal / noise).log10()
}

/// Empirical `quantile` of `‖η‖₂` over `trials` independent noise draws
/// through `system`.
pub fn epsilon_for_noise<R: Rng + ?Sized>(
    system: &SensingSystem,
    noise: NoiseModel,
    quantile: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::Domain(format!("quantile must lie in (0, 1), got {quantile}")));
    }
    if trials == 0 {
        return Err(Error::Domain("epsilon estimate needs at least one trial".into()));
    }
    if noise.sigma2() == 0.0 {
        return Ok(0.0);
    }
    let mut norms: Vec<f64> = (0..trials).map(|_| sensing_noise(system, noise, rng).norm()).collect();
    norms.sort_by(f64::total_cmp);
    // nearest-rank quantile
    let rank = ((quantile * trials as f64).ceil() as usize).clamp(1, trials);
    Ok(norms[rank - 1])
}
