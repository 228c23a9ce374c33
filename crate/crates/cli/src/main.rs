//! `signeval`: validate sign datasets, score predictions and run the
//! detect-then-read baseline.
//!
//! Exit codes: 0 success, 1 validation findings, 2 I/O, schema or usage
//! failure, 3 a required backend or embedder is unavailable.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use signeval_core::model::TextMode;
use signeval_core::report::Format;

#[derive(Debug, Parser)]
#[command(name = "signeval", version, about = "Navigational sign understanding toolkit")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Only print results and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Relaxed,
}

impl From<ModeArg> for TextMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => TextMode::Strict,
            ModeArg::Relaxed => TextMode::Relaxed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    /// Detect signs, then read each detected crop.
    EndToEnd,
    /// Read the annotated crops of readable signs.
    Recognition,
}

#[derive(Debug, Args)]
pub struct EvalInputs {
    /// Ground-truth dataset JSON.
    #[arg(long)]
    pub gt: PathBuf,
    /// Predictions JSON.
    #[arg(long)]
    pub pred: PathBuf,
    /// Also write the full result as JSON here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CueArgs {
    /// Text equivalence: exact or substring.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Cosine similarity needed for symbol places to match.
    #[arg(long, value_name = "TAU")]
    pub symbol_threshold: Option<f64>,
    /// Embedding model id for symbol places.
    #[arg(long, value_name = "ID")]
    pub embedder: Option<String>,
    /// Endpoint of a remote embedding model.
    #[arg(long, value_name = "URL")]
    pub embedder_url: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a ground-truth file and summarize its contents.
    Validate { dataset: PathBuf },
    /// Detection AP/AR.
    EvalDet {
        #[command(flatten)]
        inputs: EvalInputs,
    },
    /// Cue precision/recall and per-sign accuracy on annotated crops.
    EvalRec {
        #[command(flatten)]
        inputs: EvalInputs,
        #[command(flatten)]
        cues: CueArgs,
    },
    /// Sign-level precision/recall of detect-then-read predictions.
    EvalE2e {
        #[command(flatten)]
        inputs: EvalInputs,
        #[command(flatten)]
        cues: CueArgs,
        /// Minimum IoU between predicted and annotated boxes.
        #[arg(long)]
        iou: Option<f64>,
        /// Count predictions that match no annotated box as imprecise.
        #[arg(long)]
        count_unmatched: bool,
    },
    /// Run the baseline against detector and recognizer endpoints.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        /// Predictions output; manifest.json and run_stats.json go next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = RunMode::EndToEnd)]
        mode: RunMode,
        /// Response cache directory.
        #[arg(long, value_name = "DIR")]
        cache: Option<PathBuf>,
        /// Concurrent backend calls.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Skip detections below this confidence.
        #[arg(long)]
        min_confidence: Option<f64>,
        #[arg(long, value_name = "URL")]
        detector_url: Option<String>,
        #[arg(long, value_name = "ID")]
        detector_model: Option<String>,
        #[arg(long)]
        detector_query: Option<String>,
        #[arg(long, value_name = "URL")]
        recognizer_url: Option<String>,
        #[arg(long, value_name = "ID")]
        recognizer_model: Option<String>,
    },
    /// Render a saved result JSON.
    Report { result: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
