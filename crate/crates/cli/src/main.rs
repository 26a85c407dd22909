use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use commentary_ocr_cli::commands::{normalize_timestamp, now_timestamp};
use commentary_ocr_cli::{
    CliError, EvaluateOptions, RunManifest, cmd_evaluate, cmd_postprocess, cmd_report, cmd_stats,
};

#[derive(Parser)]
#[command(name = "commentary-ocr", version, about = "OCR post-processing and evaluation for classical commentaries")]
struct Cli {
    /// Run manifest (TOML)
    #[arg(long, global = true, default_value = "manifest.toml")]
    manifest: PathBuf,
    /// Worker threads; defaults to the number of CPUs
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Fixed report timestamp (RFC 3339) for reproducible output
    #[arg(long, global = true)]
    pin_timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Character counts and Greek share per region group
    Stats,
    /// Dehyphenate and spellcheck OCR pages
    Postprocess,
    /// Align OCR with GT and compute CER, WER, F1 and NLD
    Evaluate {
        /// Minimum IoU for two words to match
        #[arg(long, default_value_t = commentary_ocr::evaluate::DEFAULT_IOU_THRESHOLD)]
        iou: f64,
        /// Report per-group rows
        #[arg(long, value_enum, default_value = "on")]
        groups: Toggle,
        /// Also evaluate post-processed OCR, as `<pipeline>+post`
        #[arg(long)]
        postprocess: bool,
    },
    /// Re-render the Markdown report from metrics.json
    Report,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let timestamp = match &cli.pin_timestamp {
        Some(ts) => normalize_timestamp(ts)?,
        None => now_timestamp(),
    };
    if let Some(n) = cli.jobs {
        // only fails if a global pool already exists, which it cannot here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let manifest = RunManifest::load(&cli.manifest)?;
    match cli.command {
        Command::Stats => {
            print!("{}", cmd_stats(&manifest, &timestamp)?.to_markdown());
        }
        Command::Postprocess => {
            let s = cmd_postprocess(&manifest)?;
            println!(
                "{} pages, {} corrections, {} unresolved hyphens -> {}",
                s.pages,
                s.corrections,
                s.unresolved_hyphens,
                s.output_dir.display()
            );
        }
        Command::Evaluate { iou, groups, postprocess } => {
            let opts = EvaluateOptions { iou, groups: matches!(groups, Toggle::On), timestamp, postprocess };
            print!("{}", cmd_evaluate(&manifest, &opts)?.to_markdown());
        }
        Command::Report => {
            print!("{}", cmd_report(&manifest)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
