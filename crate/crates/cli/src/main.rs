//! `ladderforge`: build per-title bitrate ladders from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;
mod failure;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ladderforge_core::ingest::Colorspace;
use ladderforge_core::VsrTag;

use failure::{usage, CmdResult, Failure};
use settings::CommonArgs;

pub const THREADS_ENV: &str = "LADDERFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ladderforge",
    version,
    about = "Per-title bitrate ladder construction"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write synthetic clips as Y4M files.
    Generate {
        /// Clip spec such as `id=busy,pattern=noise,sigma=30,w=64,h=64,frames=8`.
        #[arg(long = "synth", value_name = "SPEC", required = true)]
        synth: Vec<String>,
        #[arg(long, default_value = "420jpeg", value_name = "TAG")]
        colorspace: Colorspace,
    },
    /// Compute complexity features, one CSV row per segment.
    Analyze {
        /// Y4M files, or raw luma files when --raw-size is given.
        inputs: Vec<PathBuf>,
        /// Synthetic clip spec; see `generate`.
        #[arg(long = "synth", value_name = "SPEC")]
        synth: Vec<String>,
        /// Treat inputs as headerless 8-bit luma of this size, e.g. `1920x1080`.
        #[arg(long = "raw-size", value_name = "WxH")]
        raw_size: Option<String>,
        #[arg(long = "raw-fps", default_value_t = 30, value_name = "FPS")]
        raw_fps: u32,
    },
    /// Produce training rows from features with the built-in encode simulator.
    SynthRecords {
        #[arg(long, value_name = "CSV")]
        features: PathBuf,
        /// VSR contexts to generate rows for.
        #[arg(long = "tags", value_delimiter = ',', default_value = "none,fsrcnn")]
        tags: Vec<VsrTag>,
    },
    /// Fit quality and time forests for every (target, vsr tag) in a training CSV.
    Train { training: PathBuf },
    /// Build per-title ladders from features and trained models.
    Ladder {
        #[arg(long, value_name = "CSV")]
        features: PathBuf,
        #[arg(long, value_name = "DIR")]
        models: PathBuf,
    },
    /// Write the fixed HLS baseline ladder for every segment.
    Baseline {
        #[arg(long, value_name = "CSV")]
        features: PathBuf,
    },
    /// Measure ladders with the encode simulator into an evaluation CSV.
    Simulate {
        #[arg(long, value_name = "CSV")]
        features: PathBuf,
        /// Directory of manifests written by `ladder` or `baseline`.
        #[arg(long, value_name = "DIR")]
        manifests: PathBuf,
    },
    /// Compare a candidate evaluation CSV against a baseline one.
    Evaluate {
        baseline: PathBuf,
        candidate: PathBuf,
    },
}

fn configure_threads() -> CmdResult {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        usage(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| failure::internal(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    let common = &cli.common;
    let cfg = common.resolve()?;
    match cli.command {
        Command::Generate { synth, colorspace } => {
            commands::generate(common, &cfg, &synth, colorspace)
        }
        Command::Analyze {
            inputs,
            synth,
            raw_size,
            raw_fps,
        } => commands::analyze(common, &cfg, &inputs, &synth, raw_size.as_deref(), raw_fps),
        Command::SynthRecords { features, tags } => {
            commands::synth_records(common, &cfg, &features, &tags)
        }
        Command::Train { training } => commands::train(common, &cfg, &training),
        Command::Ladder { features, models } => commands::ladder(common, &cfg, &features, &models),
        Command::Baseline { features } => commands::baseline(common, &cfg, &features),
        Command::Simulate {
            features,
            manifests,
        } => commands::simulate(common, &cfg, &features, &manifests),
        Command::Evaluate {
            baseline,
            candidate,
        } => commands::evaluate(common, &cfg, &baseline, &candidate),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ladderforge: {f}");
            Failure::exit_code(&f)
        }
    }
}
