//! Experiment configuration.
//!
//! Configurations are TOML documents with five sections. Only `[spectrum]`
//! is mandatory; every other key has a default. Unknown keys are rejected.
//!
//! ```toml
//! [spectrum]
//! n = 256
//! block_sizes = [64, 64, 64, 64]
//! block_prob = [0.1, 0.01, 0.1, 0.01]   # or band_prob = [p_1, ..., p_n]
//!
//! [sensing]
//! m = 35                  # or leave out and set k0 / c
//! alpha = 0.04
//!
//! [signal]
//! magnitude_range = [0.5, 2.0]
//! snr_db = [5, 10, 15, 20, 25]          # or sigma2 = 0.01
//!
//! [experiment]
//! trials = 200
//! master_seed = 1
//! methods = ["weighted_l1", "l1", "omp", "cosamp"]
//! ```

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::occupancy::{measurement_count, select_sparsity_level, BlockPartition, OccupancyProfile};
use crate::recovery::SolverOptions;
use crate::signal::MagnitudeRange;
use crate::{Error, Result};

pub const DEFAULT_MSE_TRIALS: usize = 200;
pub const DEFAULT_ROC_TRIALS: usize = 500;

/// Recovery algorithms the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    WeightedL1,
    L1,
    Omp,
    Cosamp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::WeightedL1, Method::L1, Method::Omp, Method::Cosamp];

    pub fn name(self) -> &'static str {
        match self {
            Method::WeightedL1 => "weighted_l1",
            Method::L1 => "l1",
            Method::Omp => "omp",
            Method::Cosamp => "cosamp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub n: usize,
    pub block_sizes: Vec<usize>,
    /// One probability per block, applied to every band of the block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_prob: Option<Vec<f64>>,
    /// One probability per band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_prob: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensingConfig {
    /// Measurement count. When absent it is derived from `k0` and `c`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Sparsity level. When absent it is selected from `alpha`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    pub c: f64,
    pub alpha: f64,
    pub freeze_sensing_matrix: bool,
    pub epsilon_quantile: f64,
    pub epsilon_trials: usize,
}

impl Default for SensingConfig {
    fn default() -> Self {
        Self {
            m: None,
            k0: None,
            c: 1.0,
            alpha: 0.04,
            freeze_sensing_matrix: false,
            epsilon_quantile: 0.95,
            epsilon_trials: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalConfig {
    pub magnitude_range: [f64; 2],
    /// Fixed time-domain noise variance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    /// Target sensing SNRs in dB; noise is rescaled per trial to hit each.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<Vec<f64>>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            magnitude_range: [0.5, 2.0],
            sigma2: None,
            snr_db: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Defaults to 200 for `mse-sweep` and 500 for `roc`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    pub pf_grid: Vec<f64>,
    /// Last row of the bound curve; defaults to `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_k0_max: Option<usize>,
    /// Sparsity handed to OMP and CoSaMP; defaults to `k0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_sparsity: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            trials: None,
            master_seed: 0,
            methods: Method::ALL.to_vec(),
            pf_grid: vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
            bound_k0_max: None,
            greedy_sparsity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub primal_tolerance: f64,
    pub dual_tolerance: f64,
    pub penalty: f64,
    pub feasibility_slack: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverOptions::default().into()
    }
}

impl From<SolverOptions> for SolverConfig {
    fn from(o: SolverOptions) -> Self {
        Self {
            max_iterations: o.max_iterations,
            primal_tolerance: o.primal_tolerance,
            dual_tolerance: o.dual_tolerance,
            penalty: o.penalty,
            feasibility_slack: o.feasibility_slack,
        }
    }
}

impl From<&SolverConfig> for SolverOptions {
    fn from(c: &SolverConfig) -> Self {
        Self {
            max_iterations: c.max_iterations,
            primal_tolerance: c.primal_tolerance,
            dual_tolerance: c.dual_tolerance,
            penalty: c.penalty,
            feasibility_slack: c.feasibility_slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub sensing: SensingConfig,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default)]
    pub experiment: RunConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

/// Noise setting of a Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSetting {
    Sigma2(f64),
    SnrDb(Vec<f64>),
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

fn check_probability_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::parse(&text).map_err(|e| match e {
        Error::ConfigParse { message, .. } => Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

impl ExperimentConfig {
    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: "<string>".into(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serialises")
    }

    pub fn partition(&self) -> Result<BlockPartition> {
        BlockPartition::new(self.spectrum.n, self.spectrum.block_sizes.clone())
            .map_err(|e| invalid(e.to_string()))
    }

    pub fn profile(&self) -> Result<OccupancyProfile> {
        let partition = self.partition()?;
        let s = &self.spectrum;
        let profile = match (&s.block_prob, &s.band_prob) {
            (Some(block), None) => OccupancyProfile::from_block_probs(partition, block),
            (None, Some(band)) => OccupancyProfile::new(partition, band.clone()),
            (Some(_), Some(_)) => return Err(invalid("give either block_prob or band_prob, not both")),
            (None, None) => return Err(invalid("spectrum needs block_prob or band_prob")),
        };
        profile.map_err(|e| invalid(e.to_string()))
    }

    pub fn magnitude_range(&self) -> Result<MagnitudeRange> {
        let [lo, hi] = self.signal.magnitude_range;
        MagnitudeRange::new(lo, hi).map_err(|e| invalid(e.to_string()))
    }

    pub fn solver_options(&self) -> SolverOptions {
        (&self.solver).into()
    }

    /// Sparsity level: the configured `k0`, else the smallest level whose
    /// tail bound reaches `1 − alpha`.
    pub fn sparsity_level(&self) -> Result<usize> {
        match self.sensing.k0 {
            Some(k0) => Ok(k0),
            None => select_sparsity_level(&self.profile()?, self.sensing.alpha),
        }
    }

    /// Measurement count: the configured `m`, else `⌈c·k0·ln(n/k0)⌉`.
    pub fn measurements(&self) -> Result<usize> {
        match self.sensing.m {
            Some(m) => Ok(m),
            None => {
                let n = self.spectrum.n;
                let m = measurement_count(self.sparsity_level()?, n, self.sensing.c)?;
                if m > n {
                    return Err(invalid(format!("derived measurement count {m} exceeds n = {n}; set sensing.m")));
                }
                Ok(m)
            }
        }
    }

    pub fn greedy_sparsity(&self) -> Result<usize> {
        match self.experiment.greedy_sparsity {
            Some(k) => Ok(k),
            None => self.sparsity_level(),
        }
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.experiment.trials.unwrap_or(default)
    }

    pub fn noise(&self) -> Result<NoiseSetting> {
        match (self.signal.sigma2, &self.signal.snr_db) {
            (Some(s), None) => Ok(NoiseSetting::Sigma2(s)),
            (None, Some(grid)) => Ok(NoiseSetting::SnrDb(grid.clone())),
            (Some(_), Some(_)) => Err(invalid("give either signal.sigma2 or signal.snr_db, not both")),
            (None, None) => Err(invalid("experiment needs signal.sigma2 or signal.snr_db")),
        }
    }

    /// Copy with every derivable default written out, as logged next to
    /// experiment outputs.
    pub fn resolved(&self, default_trials: Option<usize>) -> Result<Self> {
        let mut out = self.clone();
        // levels that cannot be derived (empty profile, k0 = n) stay unset
        let n = self.spectrum.n;
        out.sensing.m = self.measurements().ok();
        out.sensing.k0 = self.sparsity_level().ok().filter(|&k| k < n);
        out.experiment.greedy_sparsity = self.greedy_sparsity().ok();
        out.experiment.bound_k0_max = Some(self.experiment.bound_k0_max.unwrap_or(self.spectrum.n));
        if out.experiment.trials.is_none() {
            out.experiment.trials = default_trials;
        }
        Ok(out)
    }

    /// Checks every invariant that does not depend on which experiment runs.
    pub fn validate(&self) -> Result<()> {
        self.profile()?;
        let n = self.spectrum.n;
        self.magnitude_range()?;

        let sensing = &self.sensing;
        if let Some(m) = sensing.m {
            if m == 0 || m > n {
                return Err(invalid(format!("sensing.m must lie in 1..={n}, got {m}")));
            }
        }
        if let Some(k0) = sensing.k0 {
            if k0 == 0 || k0 >= n {
                return Err(invalid(format!("sensing.k0 must lie in 1..{n}, got {k0}")));
            }
        }
        if !(sensing.c > 0.0) || !sensing.c.is_finite() {
            return Err(invalid(format!("sensing.c must be positive, got {}", sensing.c)));
        }
        check_probability_open("sensing.alpha", sensing.alpha)?;
        check_probability_open("sensing.epsilon_quantile", sensing.epsilon_quantile)?;
        if sensing.epsilon_trials == 0 {
            return Err(invalid("sensing.epsilon_trials must be at least 1"));
        }
        if let Some(s) = self.signal.sigma2 {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(invalid(format!("signal.sigma2 must be finite and nonnegative, got {s}")));
            }
        }
        if let Some(grid) = &self.signal.snr_db {
            if grid.is_empty() {
                return Err(invalid("signal.snr_db must not be empty"));
            }
            if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
                return Err(invalid(format!("signal.snr_db entries must be finite, got {v}")));
            }
        }
        if self.signal.sigma2.is_some() && self.signal.snr_db.is_some() {
            return Err(invalid("give either signal.sigma2 or signal.snr_db, not both"));
        }

        let run = &self.experiment;
        if run.trials == Some(0) {
            return Err(invalid("experiment.trials must be at least 1"));
        }
        if run.methods.is_empty() {
            return Err(invalid("experiment.methods must not be empty"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = run.methods.iter().find(|m| !seen.insert(**m)) {
            return Err(invalid(format!("experiment.methods lists {dup} twice")));
        }
        if run.pf_grid.is_empty() {
            return Err(invalid("experiment.pf_grid must not be empty"));
        }
        for &pf in &run.pf_grid {
            check_probability_open("experiment.pf_grid entry", pf)?;
        }
        if let Some(k) = run.bound_k0_max {
            if k == 0 || k > n {
                return Err(invalid(format!("experiment.bound_k0_max must lie in 1..={n}, got {k}")));
            }
        }
        if run.greedy_sparsity == Some(0) {
            return Err(invalid("experiment.greedy_sparsity must be at least 1"));
        }
        self.solver_options().validate().map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[spectrum]\nn = 8\nblock_sizes = [4, 4]\nblock_prob = [0.5, 0.1]\n";

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.sensing, SensingConfig::default());
        assert_eq!(c.experiment.methods, Method::ALL.to_vec());
        assert_eq!(c.experiment.pf_grid.len(), 10);
        assert!((c.experiment.pf_grid[9] - 0.5).abs() < 1e-15);
        assert_eq!(c.solver_options(), SolverOptions::default());
        assert!(c.noise().is_err());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse(&format!("{MINIMAL}bogus_key = 3\n")).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
        let err = ExperimentConfig::parse(&format!("{MINIMAL}[signal]\nsnr = [1.0]\n")).unwrap_err();
        assert!(err.to_string().contains("snr"), "{err}");
    }

    #[test]
    fn parse_error_reports_line() {
        let err = ExperimentConfig::parse("[spectrum]\nn = 8\nblock_sizes = [4, 4\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { .. }));
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn invariant_breaches() {
        let bad_sum = "[spectrum]\nn = 9\nblock_sizes = [4, 4]\nblock_prob = [0.5, 0.1]\n";
        assert!(matches!(ExperimentConfig::parse(bad_sum), Err(Error::ConfigInvalid(_))));
        let zero_trials = format!("{MINIMAL}[experiment]\ntrials = 0\n");
        let err = ExperimentConfig::parse(&zero_trials).unwrap_err();
        assert!(err.to_string().contains("trials"), "{err}");
        let both = format!("{MINIMAL}[signal]\nsigma2 = 1.0\nsnr_db = [3.0]\n");
        assert!(ExperimentConfig::parse(&both).is_err());
        let dup = format!("{MINIMAL}[experiment]\nmethods = [\"l1\", \"l1\"]\n");
        assert!(ExperimentConfig::parse(&dup).is_err());
        let big_m = format!("{MINIMAL}[sensing]\nm = 9\n");
        assert!(ExperimentConfig::parse(&big_m).is_err());
        let bad_method = format!("{MINIMAL}[experiment]\nmethods = [\"lasso\"]\n");
        assert!(ExperimentConfig::parse(&bad_method).is_err());
    }

    #[test]
    fn resolved_round_trips() {
        let text = format!("{MINIMAL}[sensing]\nm = 4\nalpha = 0.5\n[signal]\nsigma2 = 0.5\n");
        let c = ExperimentConfig::parse(&text).unwrap();
        let r = c.resolved(Some(200)).unwrap();
        assert_eq!(r.sensing.m, Some(4));
        assert!(r.sensing.k0.is_some());
        assert_eq!(r.experiment.trials, Some(200));
        assert_eq!(ExperimentConfig::parse(&r.to_toml()).unwrap(), r);
    }
}
