//! Monte-Carlo experiments behind the CLI subcommands.
//!
//! Every trial draws, in this order, the sensing matrix (unless frozen), the
//! occupancy realization, the spectrum and a unit-variance noise draw from
//! its own seeded stream. All methods see the same draws, and an MSE sweep
//! reuses them at every SNR point, only rescaling the noise.

use rayon::prelude::*;

use super::config::{ExperimentConfig, Method, NoiseSetting, DEFAULT_MSE_TRIALS, DEFAULT_ROC_TRIALS};
use super::seed::trial_rng;
use super::table::{ResultTable, BOUND_COLUMNS, MSE_COLUMNS, ROC_COLUMNS, WEIGHTS_COLUMNS};
use crate::detection::{detect, detection_threshold};
use crate::occupancy::{
    block_averages, exact_tail, occupancy_pmf, sample_realization, tail_lower_bound, BlockPartition, OccupancyProfile,
    OccupancyRealization,
};
use crate::recovery::{
    compute_weights_floored, recovery_error, solve_cosamp, solve_l1, solve_omp, solve_weighted_l1, RecoveryResult,
    SolverOptions, WeightVector,
};
use crate::sensing::{epsilon_for_noise, generate_sensing_matrix, sensing_noise, SensingSystem};
use crate::signal::{synthesize_spectrum, MagnitudeRange, NoiseModel};
use crate::{CVector, Complex64, Error, Result};

const SENSING_MATRIX_ID: &str = "sensing-matrix";
const EPSILON_ID: &str = "epsilon";
pub const MSE_ID: &str = "mse-sweep";
pub const ROC_ID: &str = "roc";

/// `(block, k_bar, omega)` for every block, blocks numbered from 1.
pub fn run_weights(config: &ExperimentConfig) -> Result<ResultTable> {
    let averages = block_averages(&config.profile()?);
    let weights = compute_weights_floored(&averages)?;
    let mut table = ResultTable::new(&WEIGHTS_COLUMNS);
    for (l, (&k, &w)) in averages.iter().zip(weights.as_slice()).enumerate() {
        table.push(vec![(l + 1).into(), k.into(), w.into()])?;
    }
    Ok(table)
}

/// `(k0, bound, exact_tail)` for `k0` from `⌈μ⌉` to `bound_k0_max`, where
/// `exact_tail = Pr(X ≤ k0)`.
pub fn run_bound_curve(config: &ExperimentConfig) -> Result<ResultTable> {
    let profile = config.profile()?;
    let mu = profile.mean_occupied();
    if !(mu > 0.0) {
        return Err(Error::Domain("bound curve needs a profile with positive mean occupancy".into()));
    }
    let pmf = occupancy_pmf(&profile);
    let first = (mu.ceil() as usize).max(1);
    let last = config.experiment.bound_k0_max.unwrap_or(config.spectrum.n);
    let mut table = ResultTable::new(&BOUND_COLUMNS);
    for k0 in first..=last {
        let bound = tail_lower_bound(&profile, k0)?;
        table.push(vec![k0.into(), bound.into(), exact_tail(&pmf, k0).into()])?;
    }
    Ok(table)
}

/// Everything a trial needs that does not change between trials.
struct Setup {
    profile: OccupancyProfile,
    partition: BlockPartition,
    range: MagnitudeRange,
    weights: WeightVector,
    opts: SolverOptions,
    methods: Vec<Method>,
    m: usize,
    n: usize,
    omp_sparsity: usize,
    cosamp_sparsity: usize,
    frozen: Option<SensingSystem>,
    /// `ε` for unit noise variance; scaled by `σ` per trial.
    epsilon_unit: f64,
    seed: u64,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let profile = config.profile()?;
        let partition = profile.partition().clone();
        let n = partition.total_bands();
        let m = config.measurements()?;
        let methods = config.experiment.methods.clone();
        let greedy = if methods.iter().any(|x| matches!(x, Method::Omp | Method::Cosamp)) {
            config.greedy_sparsity()?
        } else {
            1
        };
        let seed = config.experiment.master_seed;
        let frozen = if config.sensing.freeze_sensing_matrix {
            Some(generate_sensing_matrix(m, n, &mut trial_rng(seed, SENSING_MATRIX_ID, 0))?)
        } else {
            None
        };
        // ε is calibrated once on the frozen matrix or a reference draw;
        // ‖Ψw‖ concentrates tightly enough that it carries over to redraws
        let mut rng = trial_rng(seed, EPSILON_ID, 0);
        let reference = match &frozen {
            Some(s) => s.clone(),
            None => generate_sensing_matrix(m, n, &mut rng)?,
        };
        let epsilon_unit = epsilon_for_noise(
            &reference,
            NoiseModel::new(1.0)?,
            config.sensing.epsilon_quantile,
            config.sensing.epsilon_trials,
            &mut rng,
        )?;
        Ok(Self {
            weights: compute_weights_floored(&block_averages(&profile))?,
            range: config.magnitude_range()?,
            opts: config.solver_options(),
            omp_sparsity: greedy.min(m),
            cosamp_sparsity: greedy.min(n / 3).max(1),
            profile,
            partition,
            methods,
            m,
            n,
            frozen,
            epsilon_unit,
            seed,
        })
    }

    fn recover(&self, method: Method, system: &SensingSystem, y: &CVector, epsilon: f64) -> Result<RecoveryResult> {
        match method {
            Method::WeightedL1 => solve_weighted_l1(system, y, &self.weights, &self.partition, epsilon, &self.opts),
            Method::L1 => solve_l1(system, y, epsilon, &self.opts),
            Method::Omp => solve_omp(system, y, self.omp_sparsity, epsilon),
            Method::Cosamp => solve_cosamp(system, y, self.cosamp_sparsity, epsilon, &self.opts),
        }
    }

    fn draw(&self, experiment: &str, trial: usize) -> Result<Draw> {
        let mut rng = trial_rng(self.seed, experiment, trial as u64);
        let system = match &self.frozen {
            Some(s) => s.clone(),
            None => generate_sensing_matrix(self.m, self.n, &mut rng)?,
        };
        let realization = sample_realization(&self.profile, &mut rng);
        let x0 = synthesize_spectrum(&realization, self.range, &mut rng).into_values();
        let unit_noise = sensing_noise(&system, NoiseModel::new(1.0)?, &mut rng);
        let clean = system.apply(&x0);
        Ok(Draw {
            system,
            realization,
            x0,
            clean,
            unit_noise,
        })
    }
}

struct Draw {
    system: SensingSystem,
    realization: OccupancyRealization,
    x0: CVector,
    /// `A x₀`.
    clean: CVector,
    /// `Ψ w` for `w` of unit variance.
    unit_noise: CVector,
}

impl Draw {
    /// Noise standard deviation that puts the sensing SNR at `snr_db`.
    fn sigma_for_snr(&self, snr_db: f64) -> f64 {
        let noise = self.unit_noise.norm();
        if noise == 0.0 {
            return 0.0;
        }
        self.clean.norm() / (noise * 10f64.powf(snr_db / 20.0))
    }

    fn measurements(&self, sigma: f64) -> CVector {
        &self.clean + &self.unit_noise * Complex64::new(sigma, 0.0)
    }

    fn snr_db(&self, sigma: f64) -> f64 {
        let noise = sigma * sigma * self.unit_noise.norm_squared();
        if noise == 0.0 {
            return f64::INFINITY;
        }
        10.0 * (self.clean.norm_squared() / noise).log10()
    }
}

/// SNR targets of the sweep; `sigma2` mode has one point without a target.
fn grid_points(noise: &NoiseSetting) -> Vec<Option<f64>> {
    match noise {
        NoiseSetting::SnrDb(grid) => grid.iter().map(|&s| Some(s)).collect(),
        NoiseSetting::Sigma2(_) => vec![None],
    }
}

fn sigma_at(noise: &NoiseSetting, point: Option<f64>, draw: &Draw) -> f64 {
    match (noise, point) {
        (_, Some(snr)) => draw.sigma_for_snr(snr),
        (NoiseSetting::Sigma2(s2), None) => s2.sqrt(),
        (NoiseSetting::SnrDb(_), None) => unreachable!("SNR grids always carry a point"),
    }
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `(snr_db, method, trials, mean_error, std_error)` per grid point and
/// method. `std_error` is the sample standard deviation of the per-trial
/// ℓ2 errors. With a fixed `sigma2` there is one grid point whose `snr_db`
/// is the mean realised sensing SNR.
pub fn run_mse_sweep(config: &ExperimentConfig) -> Result<ResultTable> {
    let noise = config.noise()?;
    let trials = config.trials_or(DEFAULT_MSE_TRIALS);
    let setup = Setup::new(config)?;
    let points = grid_points(&noise);

    // errors[trial][point][method], plus the realised SNR per trial and point
    let per_trial: Vec<(Vec<Vec<f64>>, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let draw = setup.draw(MSE_ID, t)?;
            let mut errors = Vec::with_capacity(points.len());
            let mut snrs = Vec::with_capacity(points.len());
            for &point in &points {
                let sigma = sigma_at(&noise, point, &draw);
                let y = draw.measurements(sigma);
                let epsilon = setup.epsilon_unit * sigma;
                let row = setup
                    .methods
                    .iter()
                    .map(|&method| recovery_error(&setup.recover(method, &draw.system, &y, epsilon)?.x_hat, &draw.x0))
                    .collect::<Result<Vec<_>>>()?;
                errors.push(row);
                snrs.push(draw.snr_db(sigma));
            }
            Ok((errors, snrs))
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(&MSE_COLUMNS);
    for (p, &point) in points.iter().enumerate() {
        let snr = match point {
            Some(s) => s,
            None => per_trial.iter().map(|t| t.1[p]).sum::<f64>() / trials as f64,
        };
        for (k, method) in setup.methods.iter().enumerate() {
            let errs: Vec<f64> = per_trial.iter().map(|t| t.0[p][k]).collect();
            let (mean, std) = mean_and_std(&errs);
            table.push(vec![snr.into(), method.name().into(), trials.into(), mean.into(), std.into()])?;
        }
    }
    Ok(table)
}

#[derive(Default, Clone, Copy)]
struct RateSum {
    pd_sum: f64,
    pd_count: usize,
    pf_sum: f64,
    pf_count: usize,
}

/// `(pf_target, method, trials, pd_mean, pf_empirical)` per false-alarm
/// target and method. `pd_mean` averages over trials with at least one
/// occupied band, `pf_empirical` over trials with at least one vacant band;
/// either is NaN if no trial qualifies.
pub fn run_roc(config: &ExperimentConfig) -> Result<ResultTable> {
    let noise = config.noise()?;
    let point = match &noise {
        NoiseSetting::SnrDb(grid) if grid.len() == 1 => Some(grid[0]),
        NoiseSetting::SnrDb(grid) => {
            return Err(Error::ConfigInvalid(format!(
                "roc runs at a single sensing SNR, got {} values in signal.snr_db",
                grid.len()
            )))
        }
        NoiseSetting::Sigma2(_) => None,
    };
    let trials = config.trials_or(DEFAULT_ROC_TRIALS);
    let setup = Setup::new(config)?;
    let pf_grid = &config.experiment.pf_grid;

    // rates[trial][pf][method]
    let per_trial: Vec<Vec<Vec<(Option<f64>, Option<f64>)>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let draw = setup.draw(ROC_ID, t)?;
            let sigma = sigma_at(&noise, point, &draw);
            let y = draw.measurements(sigma);
            let epsilon = setup.epsilon_unit * sigma;
            let estimates = setup
                .methods
                .iter()
                .map(|&method| Ok(setup.recover(method, &draw.system, &y, epsilon)?.x_hat))
                .collect::<Result<Vec<_>>>()?;
            let noise_energy = setup.n as f64 * sigma * sigma;
            pf_grid
                .iter()
                .map(|&pf| {
                    let lambda = detection_threshold(noise_energy, setup.m, setup.n, pf)?;
                    estimates
                        .iter()
                        .map(|x| detect(x, &draw.realization, lambda).map(|r| (r.pd, r.pf)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(&ROC_COLUMNS);
    for (i, &pf) in pf_grid.iter().enumerate() {
        for (k, method) in setup.methods.iter().enumerate() {
            let mut acc = RateSum::default();
            for trial in &per_trial {
                let (pd, pf_emp) = trial[i][k];
                if let Some(v) = pd {
                    acc.pd_sum += v;
                    acc.pd_count += 1;
                }
                if let Some(v) = pf_emp {
                    acc.pf_sum += v;
                    acc.pf_count += 1;
                }
            }
            let mean = |sum: f64, count: usize| if count > 0 { sum / count as f64 } else { f64::NAN };
            table.push(vec![
                pf.into(),
                method.name().into(),
                trials.into(),
                mean(acc.pd_sum, acc.pd_count).into(),
                mean(acc.pf_sum, acc.pf_count).into(),
            ])?;
        }
    }
    Ok(table)
}
