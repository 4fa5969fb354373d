//! `zsac`: zero-shot audio classification experiments over precomputed
//! embeddings.
//!
//! Subcommands: `prepare` (label intersection, pruning, caps), `run`
//! (multi-trial training and evaluation from one config), `synth`
//! (synthetic world generation), `inspect` (artifact pretty-printer).
//!
//! Exit codes: 0 success, 1 runtime failure, 2 validation failure,
//! 3 success with a warning.

mod commands;
mod config;
mod error;
mod io;
mod manifest;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::inspect::cmd_inspect;
use commands::prepare::{cmd_prepare, EmbeddingSide, PrepareArgs};
use commands::run::cmd_run;
use commands::synth::cmd_synth;
use error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "zsac",
    version,
    about = "Zero-shot audio classification over precomputed embeddings"
)]
struct Cli {
    /// Override the command's base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for trial execution (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory for output files, created if absent.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,

    /// Experiment config file (used by `run`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PrepareCli {
    /// Taxonomy JSON file.
    #[arg(long)]
    taxonomy: PathBuf,

    /// Audio-side label set, one MID per line.
    #[arg(long)]
    audio_labels: PathBuf,

    /// Image-side label set, one MID per line.
    #[arg(long)]
    image_labels: PathBuf,

    /// Audio embedding JSONL to restrict and cap.
    #[arg(long, requires = "audio_dimension")]
    audio_embeddings: Option<PathBuf>,

    /// Declared dimension of the audio embeddings.
    #[arg(long)]
    audio_dimension: Option<usize>,

    /// Per-class cap for audio instances.
    #[arg(long, default_value_t = 300)]
    audio_cap: usize,

    /// Image embedding JSONL to restrict and cap.
    #[arg(long, requires = "image_dimension")]
    image_embeddings: Option<PathBuf>,

    /// Declared dimension of the image embeddings.
    #[arg(long)]
    image_dimension: Option<usize>,

    /// Per-class cap for image instances.
    #[arg(long, default_value_t = 1000)]
    image_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Intersect label sets, prune the hierarchy, and cap sample counts.
    Prepare(PrepareCli),
    /// Run a configured multi-trial experiment.
    Run,
    /// Generate a synthetic embedding world.
    Synth {
        /// World spec JSON file.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Pretty-print any artifact file.
    Inspect {
        /// File to summarize.
        path: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<i32> {
    std::fs::create_dir_all(&cli.output_dir).map_err(|e| CliError::io(&cli.output_dir, e))?;
    match cli.command {
        Command::Prepare(args) => {
            let side = |path: Option<PathBuf>, dimension: Option<usize>, cap: usize| {
                path.map(|path| EmbeddingSide {
                    path,
                    // clap enforces the pairing via `requires`
                    dimension: dimension.expect("dimension required with embeddings"),
                    cap,
                })
            };
            let args = PrepareArgs {
                taxonomy: args.taxonomy,
                audio_labels: args.audio_labels,
                image_labels: args.image_labels,
                audio_embeddings: side(args.audio_embeddings, args.audio_dimension, args.audio_cap),
                image_embeddings: side(args.image_embeddings, args.image_dimension, args.image_cap),
                seed: cli.seed.unwrap_or(0),
            };
            cmd_prepare(&args, &cli.output_dir)
        }
        Command::Run => {
            let config = cli.config.ok_or_else(|| {
                CliError::validation("`run` needs --config pointing at an experiment file")
            })?;
            cmd_run(&config, &cli.output_dir, cli.seed, cli.jobs)
        }
        Command::Synth { spec } => cmd_synth(&spec, &cli.output_dir, cli.seed),
        Command::Inspect { path } => cmd_inspect(&path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
