//! Configuration-driven Monte-Carlo experiments with CSV output.
//!
//! Each experiment maps a validated [`ExperimentConfig`] to a
//! [`ResultTable`]. [`run_to_files`] additionally writes the CSV and the
//! resolved configuration next to it.

mod config;
mod experiments;
mod seed;
mod table;

use std::path::{Path, PathBuf};

pub use config::{
    load_config, ExperimentConfig, Method, NoiseSetting, RunConfig, SensingConfig, SignalConfig, SolverConfig,
    SpectrumConfig, DEFAULT_MSE_TRIALS, DEFAULT_ROC_TRIALS,
};
pub use experiments::{run_bound_curve, run_mse_sweep, run_roc, run_weights};
pub use seed::{trial_rng, trial_seed};
pub use table::{emit_csv, Cell, ResultTable, BOUND_COLUMNS, MSE_COLUMNS, ROC_COLUMNS, WEIGHTS_COLUMNS};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Weights,
    Bound,
    MseSweep,
    Roc,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Weights => "weights",
            Experiment::Bound => "bound",
            Experiment::MseSweep => "mse-sweep",
            Experiment::Roc => "roc",
        }
    }

    fn default_trials(self) -> Option<usize> {
        match self {
            Experiment::MseSweep => Some(DEFAULT_MSE_TRIALS),
            Experiment::Roc => Some(DEFAULT_ROC_TRIALS),
            Experiment::Weights | Experiment::Bound => None,
        }
    }
}

pub fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<ResultTable> {
    match experiment {
        Experiment::Weights => run_weights(config),
        Experiment::Bound => run_bound_curve(config),
        Experiment::MseSweep => run_mse_sweep(config),
        Experiment::Roc => run_roc(config),
    }
}

/// Where the resolved configuration for `out` is logged:
/// `results.csv` → `results.resolved.toml`.
pub fn resolved_config_path(out: &Path) -> PathBuf {
    out.with_extension("resolved.toml")
}

/// Runs `experiment`, writes the CSV to `out` and the resolved
/// configuration to [`resolved_config_path`].
pub fn run_to_files(experiment: Experiment, config: &ExperimentConfig, out: &Path) -> Result<ResultTable> {
    let resolved = config.resolved(experiment.default_trials())?;
    let table = run(experiment, &resolved)?;
    emit_csv(&table, out)?;
    let log = resolved_config_path(out);
    let text = format!("# resolved configuration for `{}`\n{}", experiment.name(), resolved.to_toml());
    std::fs::write(&log, text).map_err(|source| Error::Io { path: log, source })?;
    Ok(table)
}
