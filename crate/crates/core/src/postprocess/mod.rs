//! OCR post-processing: dehyphenation across line breaks and two lexicon
//! spellchecks for polytonic Greek, chained by [`run_pipeline`].

mod dehyphenate;
mod pipeline;
mod spellcheck;

pub use dehyphenate::{DEFAULT_HYPHENS, HyphenSet, dehyphenate, dehyphenate_with, is_marginal_at, is_marginal_number};
pub use pipeline::{PipelineConfig, PipelineResources, Stage, run_pipeline};
pub use spellcheck::{
    ConfusionMode, ConfusionPairTable, DEFAULT_MIN_LETTERS, spellcheck_confusion, spellcheck_confusion_with,
    spellcheck_unique_accent, spellcheck_unique_accent_with,
};

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PostprocessError {
    #[error("stage {stage}: {what} is not loaded")]
    MissingResource { stage: Stage, what: &'static str },
    #[error("invalid confusion table, line {line}: {message}")]
    ConfusionTable { line: usize, message: String },
    #[error("invalid pipeline config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Dehyphenation,
    UniqueAccent,
    ConfusionPair,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Dehyphenation => "dehyphenation",
            Rule::UniqueAccent => "unique-accent",
            Rule::ConfusionPair => "confusion-pair",
        })
    }
}

/// One applied correction. `line` counts lines across the whole page, in
/// region order, as the page stood when the stage ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub page: String,
    pub line: usize,
    pub word: usize,
    pub original: String,
    pub corrected: String,
    pub rule: Rule,
}

/// A line-final hyphen that could not be joined: last line of its region,
/// or the next line holds only marginal numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedHyphen {
    pub page: String,
    pub line: usize,
    pub word: usize,
    pub text: String,
}

/// Append-only record of what post-processing changed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionLog {
    records: Vec<CorrectionRecord>,
    unresolved: Vec<UnresolvedHyphen>,
}

impl CorrectionLog {
    /// Appends a record. Records that change nothing are ignored.
    pub fn push(&mut self, record: CorrectionRecord) {
        if record.original != record.corrected {
            self.records.push(record);
        }
    }

    pub fn push_unresolved(&mut self, u: UnresolvedHyphen) {
        self.unresolved.push(u);
    }

    pub fn extend(&mut self, other: CorrectionLog) {
        self.records.extend(other.records);
        self.unresolved.extend(other.unresolved);
    }

    pub fn records(&self) -> &[CorrectionRecord] {
        &self.records
    }

    pub fn unresolved(&self) -> &[UnresolvedHyphen] {
        &self.unresolved
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.records.iter().filter(|r| r.rule == rule).count()
    }

    /// Tab-separated, with a header row.
    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "page\tline\tword\toriginal\tcorrected\trule")?;
        for r in &self.records {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                tsv_field(&r.page),
                r.line,
                r.word,
                tsv_field(&r.original),
                tsv_field(&r.corrected),
                r.rule
            )?;
        }
        Ok(())
    }
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ignores_no_op_records_and_writes_tsv() {
        let mut log = CorrectionLog::default();
        let rec = |o: &str, c: &str| CorrectionRecord {
            page: "p".into(),
            line: 0,
            word: 1,
            original: o.into(),
            corrected: c.into(),
            rule: Rule::UniqueAccent,
        };
        log.push(rec("άνθρωπος", "ἄνθρωπος"));
        log.push(rec("λόγος", "λόγος"));
        assert_eq!(log.len(), 1);
        let mut buf = Vec::new();
        log.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "page\tline\tword\toriginal\tcorrected\trule\np\t0\t1\tάνθρωπος\tἄνθρωπος\tunique-accent\n"
        );
    }
}
