use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::docmodel::Page;
use crate::lexicon::{Lexicon, UniqueAccentIndex, is_greek_token};
use crate::polytonic::split_affixes;

use super::{
    ConfusionMode, ConfusionPairTable, CorrectionLog, CorrectionRecord, DEFAULT_HYPHENS, DEFAULT_MIN_LETTERS,
    HyphenSet, PostprocessError, Rule, dehyphenate_with, spellcheck_confusion_with, spellcheck_unique_accent_with,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Dehyphenate,
    UniqueAccent,
    Confusion,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Dehyphenate => "dehyphenate",
            Stage::UniqueAccent => "unique_accent",
            Stage::Confusion => "confusion",
        })
    }
}

/// Stage toggles and order plus per-stage settings.
///
/// ```toml
/// stages = ["dehyphenate", "unique_accent", "confusion"]
/// hyphens = ["-", "‐", "­", "⸗"]
/// unique_accent_min_letters = 5
/// confusion_mode = "occurrence"        # or "pair_type"
/// confusion_table = "confusion.tsv"    # relative to the config file
/// ```
///
/// Stages not listed are disabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
    pub hyphens: Vec<char>,
    pub unique_accent_min_letters: usize,
    pub confusion_mode: ConfusionMode,
    pub confusion_table: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stages: vec![Stage::Dehyphenate, Stage::UniqueAccent, Stage::Confusion],
            hyphens: DEFAULT_HYPHENS.to_vec(),
            unique_accent_min_letters: DEFAULT_MIN_LETTERS,
            confusion_mode: ConfusionMode::Occurrence,
            confusion_table: None,
        }
    }
}

impl PipelineConfig {
    pub fn disabled() -> Self {
        Self { stages: Vec::new(), ..Self::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self, PostprocessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| PostprocessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file; a relative `confusion_table` is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, PostprocessError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PostprocessError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(table), Some(dir)) = (&cfg.confusion_table, path.parent())
            && table.is_relative()
        {
            cfg.confusion_table = Some(dir.join(table));
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), PostprocessError> {
        for (i, s) in self.stages.iter().enumerate() {
            if self.stages[..i].contains(s) {
                return Err(PostprocessError::Config(format!("stage {s} listed twice")));
            }
        }
        Ok(())
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    /// The configured confusion table, or the bundled default.
    pub fn load_confusion_table(&self) -> Result<ConfusionPairTable, PostprocessError> {
        match &self.confusion_table {
            Some(p) => ConfusionPairTable::load(p),
            None => Ok(ConfusionPairTable::default()),
        }
    }
}

/// Lexical resources the spellcheck stages read.
#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineResources<'a> {
    pub unique_accent: Option<&'a UniqueAccentIndex>,
    pub lexicon: Option<&'a Lexicon>,
    pub confusion_table: Option<&'a ConfusionPairTable>,
}

/// Runs the enabled stages in configured order. Spellchecks touch only
/// predominantly Greek words, and only their letter-bounded core:
/// surrounding punctuation is kept as is.
pub fn run_pipeline(
    page: &Page,
    cfg: &PipelineConfig,
    res: &PipelineResources,
) -> Result<(Page, CorrectionLog), PostprocessError> {
    for stage in &cfg.stages {
        match stage {
            Stage::UniqueAccent if res.unique_accent.is_none() => {
                return Err(PostprocessError::MissingResource { stage: *stage, what: "unique-accent index" });
            }
            Stage::Confusion if res.lexicon.is_none() => {
                return Err(PostprocessError::MissingResource { stage: *stage, what: "lexicon" });
            }
            Stage::Confusion if res.confusion_table.is_none() => {
                return Err(PostprocessError::MissingResource { stage: *stage, what: "confusion table" });
            }
            _ => {}
        }
    }

    let hyphens = HyphenSet::new(cfg.hyphens.iter().copied());
    let mut current = page.clone();
    let mut log = CorrectionLog::default();
    for stage in &cfg.stages {
        match stage {
            Stage::Dehyphenate => {
                let (next, stage_log) = dehyphenate_with(&current, &hyphens);
                current = next;
                log.extend(stage_log);
            }
            Stage::UniqueAccent => {
                let idx = res.unique_accent.expect("checked above");
                let min = cfg.unique_accent_min_letters;
                correct_words(&mut current, &mut log, Rule::UniqueAccent, |w| {
                    spellcheck_unique_accent_with(w, idx, min)
                });
            }
            Stage::Confusion => {
                let lex = res.lexicon.expect("checked above");
                let table = res.confusion_table.expect("checked above");
                let mode = cfg.confusion_mode;
                correct_words(&mut current, &mut log, Rule::ConfusionPair, |w| {
                    spellcheck_confusion_with(w, lex, table, mode)
                });
            }
        }
    }
    Ok((current, log))
}

fn correct_words(page: &mut Page, log: &mut CorrectionLog, rule: Rule, fix: impl Fn(&str) -> String) {
    let page_id = page.id.clone();
    let mut line_no = 0;
    for region in &mut page.regions {
        for line in &mut region.lines {
            for (wi, word) in line.words.iter_mut().enumerate() {
                let (pre, core, post) = split_affixes(&word.text);
                if core.is_empty() || !is_greek_token(core) {
                    continue;
                }
                let fixed = fix(core);
                if fixed != core {
                    let corrected = format!("{pre}{fixed}{post}");
                    log.push(CorrectionRecord {
                        page: page_id.clone(),
                        line: line_no,
                        word: wi,
                        original: std::mem::replace(&mut word.text, corrected.clone()),
                        corrected,
                        rule,
                    });
                }
            }
            line_no += 1;
        }
    }
}
