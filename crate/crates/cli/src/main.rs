//! `psnn`: design the ring bank, program levels, train and convert the
//! network, and evaluate accuracy and energy on MNIST.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or
//! arguments, 3 missing prerequisite artifact.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use photonic_snn::snn::Mode;

use commands::{CliError, Context};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "psnn", version, about = "Photonic spiking neural network simulator")]
struct Cli {
    /// Experiment configuration (TOML); lengths in m, powers in W, times in s.
    #[arg(long, global = true, env = "PSNN_CONFIG")]
    config: Option<PathBuf>,
    /// Master random seed, overrides the configuration.
    #[arg(long, global = true, env = "PSNN_SEED")]
    seed: Option<u64>,
    /// Directory receiving artifacts and CSV reports.
    #[arg(long, global = true, env = "PSNN_OUT")]
    out: Option<PathBuf>,
    /// Directory holding the MNIST IDX files.
    #[arg(long, global = true, env = "PSNN_MNIST_DIR")]
    mnist: Option<PathBuf>,
    /// Worker threads for per-image parallelism (default: all cores).
    /// Results do not depend on this value.
    #[arg(long, global = true, env = "PSNN_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ideal,
    Quantized,
    Crosstalk,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ideal => Mode::Ideal,
            ModeArg::Quantized => Mode::Quantized,
            ModeArg::Crosstalk => Mode::Crosstalk,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design the ring bank; writes bank.json, bank.csv, spectral.csv
    /// (wavelengths in nm) and transmission.csv.
    Design {
        /// Number of rings (wavelength channels) in the bank.
        #[arg(long)]
        rings: Option<usize>,
    },
    /// Program the transmission levels of every ring; writes levels.json and levels.csv.
    Levels,
    /// Compute crosstalk factors per ring and level; writes crosstalk.json and alpha.csv.
    Crosstalk,
    /// Train the ANN on MNIST; writes model.json, training.csv and train_summary.csv.
    Train,
    /// Convert the trained ANN to an SNN; writes snn.json and thresholds.csv.
    Convert,
    /// Run SNN inference on the test set; writes predictions, per-step
    /// accuracy, spike raster and membrane trace CSVs plus a text summary.
    Infer {
        #[arg(long, value_enum, default_value = "crosstalk")]
        mode: ModeArg,
        /// Number of test images, from the start of the set (default: all).
        #[arg(long)]
        images: Option<usize>,
    },
    /// Account synaptic and neuron energy; writes energy.csv (joules).
    Energy {
        #[arg(long, value_enum, default_value = "crosstalk")]
        mode: ModeArg,
        /// Number of test images (default from configuration: 1000).
        #[arg(long)]
        images: Option<usize>,
    },
    /// Compare ideal, quantized and crosstalk accuracy; writes ablation.csv
    /// (degradation in percentage points).
    Ablate {
        /// Number of test images (default: all).
        #[arg(long)]
        images: Option<usize>,
    },
}

fn context(cli: &Cli, mode: Mode, images: Option<usize>) -> Result<Context, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(CliError::Config)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.paths.out = out.clone();
    }
    if let Some(dir) = &cli.mnist {
        config.paths.mnist = dir.clone();
    }
    config.run_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Context { config, mode, images })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let (mode, images) = match cli.command {
        Command::Infer { mode, images } | Command::Energy { mode, images } => (mode.into(), images),
        Command::Ablate { images } => (Mode::Crosstalk, images),
        _ => (Mode::Crosstalk, None),
    };
    let ctx = context(&cli, mode, images)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Design { rings } => commands::design(&ctx, rings),
        Command::Levels => commands::levels(&ctx),
        Command::Crosstalk => commands::crosstalk(&ctx),
        Command::Train => commands::train(&ctx),
        Command::Convert => commands::convert(&ctx),
        Command::Infer { .. } => commands::infer(&ctx),
        Command::Energy { .. } => commands::energy(&ctx),
        Command::Ablate { .. } => commands::ablate(&ctx),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psnn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
