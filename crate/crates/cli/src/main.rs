//! `qcnn`: file-based pipeline from jet constituents to trained classifiers.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 empty result.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Empty(String),
    Core(qcnn::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Empty(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Empty(m) => write!(f, "empty result: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<qcnn::Error> for CliError {
    fn from(e: qcnn::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcnn", version, about = "QCNN and CNN top-tagging pipeline")]
pub struct Cli {
    /// Seed for sampling, splitting and training (overrides config seeds).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Experiment config (`section.key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write toy top/QCD jets as JSON lines (jets.jsonl).
    SynthJets {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Jets (JSON lines) to a JIMG image container (images.jimg).
    Prep {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also dump the first N images as PGM files under pgm/.
        #[arg(long)]
        pgm: Option<usize>,
    },
    /// Fit PCA on the training split and write pca.json and features.csv.
    Pca {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        components: Option<usize>,
        #[arg(long)]
        train_fraction: Option<f64>,
    },
    /// Train the model kind named in the config (`model.kind`).
    Train(TrainArgs),
    /// Train a QCNN grid over circuits × encodings × losses × batch sizes.
    TrainQcnn(TrainArgs),
    /// Train a CNN grid over architectures × losses × batch sizes.
    TrainCnn(TrainArgs),
    /// Redundancy scan; writes dea_report.json and pruned_circuit.txt.
    Dea {
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long)]
        encoding: Option<String>,
        #[arg(long)]
        connectivity: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Merge run logs into compare.csv and print the final-epoch table.
    Compare {
        logs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Comma-separated circuits (SO4, SU4).
    #[arg(long)]
    pub circuit: Option<String>,
    /// Circuit text file (for example a pruned circuit); replaces --circuit/--encoding.
    #[arg(long)]
    pub circuit_file: Option<PathBuf>,
    /// Comma-separated encodings (TPE, HEE1, HEE2, CHE).
    #[arg(long)]
    pub encoding: Option<String>,
    #[arg(long)]
    pub connectivity: Option<String>,
    /// Comma-separated CNN architectures (small, large, FxD).
    #[arg(long)]
    pub arch: Option<String>,
    /// Comma-separated losses (hinge, mse, crossentropy).
    #[arg(long)]
    pub loss: Option<String>,
    /// Comma-separated batch sizes.
    #[arg(long)]
    pub batch: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Label used in file names and tables.
    #[arg(long)]
    pub name: Option<String>,
    /// Fill the wall_seconds column (makes logs non-reproducible).
    #[arg(long)]
    pub record_time: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", cli.out.display())))?;
    let ctx = commands::Context {
        cfg,
        seed: cli.seed,
        out: cli.out,
    };
    match cli.command {
        Command::SynthJets { count } => commands::synth_jets(&ctx, count),
        Command::Prep { input, pgm } => commands::prep(&ctx, input, pgm),
        Command::Pca {
            input,
            components,
            train_fraction,
        } => commands::pca(&ctx, input, components, train_fraction),
        Command::Train(args) => {
            let kind = ctx.cfg.get("model.kind").unwrap_or("qcnn").to_ascii_lowercase();
            match kind.as_str() {
                "qcnn" => commands::train_qcnn(&ctx, &args),
                "cnn" => commands::train_cnn(&ctx, &args),
                other => Err(CliError::Usage(format!("unknown model.kind '{other}' (allowed: qcnn, cnn)"))),
            }
        }
        Command::TrainQcnn(args) => commands::train_qcnn(&ctx, &args),
        Command::TrainCnn(args) => commands::train_cnn(&ctx, &args),
        Command::Dea {
            circuit,
            encoding,
            connectivity,
            tolerance,
            points,
        } => commands::dea(&ctx, circuit, encoding, connectivity, tolerance, points),
        Command::Compare { logs } => commands::compare(&ctx, &logs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
