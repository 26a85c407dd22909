//! Batch driver for the `commentary-ocr` command: corpus statistics,
//! post-processing and evaluation runs described by a TOML manifest.

pub mod commands;
pub mod corpus;
pub mod manifest;

use std::path::PathBuf;

use commentary_ocr::docmodel::DocError;
use commentary_ocr::evaluate::EvalError;
use commentary_ocr::lexicon::LexiconError;
use commentary_ocr::postprocess::PostprocessError;
use thiserror::Error;

pub use commands::{EvaluateOptions, StatsReport, cmd_evaluate, cmd_postprocess, cmd_report, cmd_stats};
pub use manifest::RunManifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("no commentaries")]
    NoCommentaries,
    #[error("missing paths: {}", list_paths(.0))]
    MissingPaths(Vec<PathBuf>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Document {
        path: PathBuf,
        #[source]
        source: DocError,
    },
    #[error("{path}: {message}")]
    PageSet { path: PathBuf, message: String },
    #[error("commentary {commentary}: {message}")]
    PageMismatch { commentary: String, message: String },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Postprocess(#[from] PostprocessError),
    #[error("{commentary}/{page}: {source}")]
    Evaluate {
        commentary: String,
        page: String,
        #[source]
        source: EvalError,
    },
    #[error("invalid timestamp {0:?}: expected RFC 3339, e.g. 2024-01-01T00:00:00Z")]
    Timestamp(String),
    #[error("{path}: {message}")]
    Report { path: PathBuf, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// 2 for a broken internal invariant, 1 for anything wrong with the
    /// inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

fn list_paths(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}
