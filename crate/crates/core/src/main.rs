use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetsense::harness::{load_config, resolved_config_path, run_to_files, Experiment};

#[derive(Parser)]
#[command(name = "hetsense", version, about = "Weighted l1 compressive spectrum sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Block averages and recovery weights
    Weights(RunArgs),
    /// Tail lower bound against the exact occupancy tail
    Bound(RunArgs),
    /// Recovery error against sensing SNR
    MseSweep(RunArgs),
    /// Detection probability against false-alarm target
    Roc(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Override experiment.master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override experiment.trials
    #[arg(long)]
    trials: Option<usize>,
}

fn run(experiment: Experiment, args: &RunArgs) -> hetsense::Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.experiment.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.experiment.trials = Some(trials);
    }
    config.validate()?;
    let table = run_to_files(experiment, &config, &args.out)?;
    eprintln!(
        "{}: {} rows -> {} (config: {})",
        experiment.name(),
        table.len(),
        args.out.display(),
        resolved_config_path(&args.out).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::Weights(a) => (Experiment::Weights, a),
        Command::Bound(a) => (Experiment::Bound, a),
        Command::MseSweep(a) => (Experiment::MseSweep, a),
        Command::Roc(a) => (Experiment::Roc, a),
    };
    match run(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
