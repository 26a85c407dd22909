//! Wordlists, the unique-accent index and dictionary-based token accuracy.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::polytonic::{normalize_nfc, split_affixes, strip_diacritics};

/// Documents whose dictionary accuracy falls below this ratio are candidates
/// for retraining the recognition model.
pub const RETRAIN_ACCURACY_THRESHOLD: f64 = 0.60;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read wordlist {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid UTF-8 in line {line}")]
    Utf8 { line: usize },
    #[error("whitespace in entry line {line}")]
    Whitespace { line: usize },
}

/// A set of NFC word forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    words: HashSet<String>,
    fold_case: bool,
}

impl Lexicon {
    /// Builds a lexicon from in-memory words, normalizing them to NFC.
    /// Case folding is on.
    pub fn from_words<I, S>(name: impl Into<String>, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            name: name.into(),
            words: words.into_iter().map(|w| normalize_nfc(w.as_ref())).collect(),
            fold_case: true,
        }
    }

    /// Parses wordlist text: one word per line, `#` comments and blank lines
    /// skipped, surrounding whitespace trimmed.
    pub fn parse(name: impl Into<String>, bytes: &[u8]) -> Result<Self, LexiconError> {
        let mut words = HashSet::new();
        for (i, raw) in bytes.split(|b| *b == b'\n').enumerate() {
            let line_no = i + 1;
            let line = std::str::from_utf8(raw).map_err(|_| LexiconError::Utf8 { line: line_no })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.chars().any(char::is_whitespace) {
                return Err(LexiconError::Whitespace { line: line_no });
            }
            words.insert(normalize_nfc(line.trim_start_matches('\u{FEFF}')));
        }
        Ok(Self { name: name.into(), words, fold_case: true })
    }

    /// Toggles lowercase folding on lookup (on by default).
    pub fn with_case_folding(mut self, fold: bool) -> Self {
        self.fold_case = fold;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn folds_case(&self) -> bool {
        self.fold_case
    }

    /// Exact membership, then lowercase membership when folding is on.
    pub fn contains(&self, word: &str) -> bool {
        if self.words.contains(word) {
            return true;
        }
        self.fold_case && {
            let lower = word.to_lowercase();
            lower != word && self.words.contains(&normalize_nfc(&lower))
        }
    }

    pub fn contains_exact(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Entries in sorted order.
    pub fn sorted_words(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.words.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Reads a UTF-8 wordlist file; the lexicon is named after the file stem.
pub fn load_wordlist(path: &Path) -> Result<Lexicon, LexiconError> {
    let bytes = std::fs::read(path).map_err(|source| LexiconError::Io { path: path.to_owned(), source })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Lexicon::parse(name, &bytes)
}

/// Maps de-accented forms to their only accented realization in a lexicon.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniqueAccentIndex {
    map: BTreeMap<String, String>,
}

impl UniqueAccentIndex {
    pub fn get(&self, deaccented: &str) -> Option<&str> {
        self.map.get(deaccented).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Two-column TSV (`deaccented<TAB>accented`), sorted by key.
    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        for (k, v) in &self.map {
            writeln!(out, "{k}\t{v}")?;
        }
        Ok(())
    }
}

/// Groups the lexicon by [`strip_diacritics`] and keeps the groups with a
/// single member.
pub fn build_unique_accent_index(lex: &Lexicon) -> UniqueAccentIndex {
    let mut groups: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for w in lex.iter() {
        groups.entry(strip_diacritics(w)).or_default().insert(w);
    }
    let map = groups
        .into_iter()
        .filter(|(_, forms)| forms.len() == 1)
        .map(|(k, forms)| {
            let only = forms.into_iter().next().expect("singleton group");
            (k, only.to_owned())
        })
        .collect();
    UniqueAccentIndex { map }
}

/// Splits text on whitespace, trims leading and trailing non-letters and
/// drops tokens without letters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| split_affixes(t).1).filter(|core| !core.is_empty()).map(normalize_nfc).collect()
}

/// Whether a token is written mostly in Greek letters.
pub fn is_greek_token(token: &str) -> bool {
    crate::polytonic::greek_ratio(token) > 0.5
}

/// Share of tokens found in the lexicon; 0 for no tokens.
pub fn dictionary_accuracy<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> f64 {
    if tokens.is_empty() {
        log::warn!("dictionary accuracy of an empty token list");
        return 0.0;
    }
    let found = tokens.iter().filter(|t| lex.contains(t.as_ref())).count();
    found as f64 / tokens.len() as f64
}

/// Dictionary accuracy of a whole text. With `greek_only`, tokens that are
/// not predominantly Greek are ignored.
pub fn document_accuracy(text: &str, lex: &Lexicon, greek_only: bool) -> f64 {
    let tokens: Vec<String> = tokenize(text).into_iter().filter(|t| !greek_only || is_greek_token(t)).collect();
    dictionary_accuracy(&tokens, lex)
}

pub fn needs_retraining(accuracy: f64) -> bool {
    accuracy < RETRAIN_ACCURACY_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_dedups_and_skips_blank_lines() {
        let lex = Lexicon::parse("t", "λόγος\nλόγος\n\n".as_bytes()).unwrap();
        assert_eq!(lex.len(), 1);
        let lex = Lexicon::parse("t", "# header\r\nλόγος\r\n  \r\nμῆνιν".as_bytes()).unwrap();
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn whitespace_inside_entry() {
        let e = Lexicon::parse("t", "λο γος\n".as_bytes()).unwrap_err();
        assert_eq!(e.to_string(), "whitespace in entry line 1");
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let e = Lexicon::parse("t", b"ok\n\xff\xfe\n").unwrap_err();
        assert!(matches!(e, LexiconError::Utf8 { line: 2 }));
    }

    #[test]
    fn decomposed_entries_are_normalized() {
        let lex = Lexicon::parse("t", "λο\u{0301}γος\n".as_bytes()).unwrap();
        assert!(lex.contains_exact("λόγος"));
    }

    #[test]
    fn case_folding() {
        let lex = Lexicon::from_words("t", ["λόγος"]);
        assert!(lex.contains("Λόγος"));
        assert!(lex.contains("ΛΌΓΟΣ"));
        let strict = lex.clone().with_case_folding(false);
        assert!(!strict.contains("Λόγος"));
        assert!(strict.contains("λόγος"));
    }

    #[test]
    fn unique_index_examples() {
        let idx = build_unique_accent_index(&Lexicon::from_words("t", ["ἄνθρωπος"]));
        assert_eq!(idx.get("ανθρωπος"), Some("ἄνθρωπος"));

        let idx = build_unique_accent_index(&Lexicon::from_words("t", ["ἤ", "ἥ", "ἦ"]));
        assert_eq!(idx.get("η"), None);
        assert!(idx.is_empty());

        let idx = build_unique_accent_index(&Lexicon::from_words("t", Vec::<&str>::new()));
        assert!(idx.is_empty());
    }

    #[test]
    fn macron_forms_are_distinct_realizations() {
        let idx = build_unique_accent_index(&Lexicon::from_words("t", ["κᾱλός", "καλός"]));
        assert_eq!(idx.get("καλος"), None);
    }

    #[test]
    fn tsv_output() {
        let idx = build_unique_accent_index(&Lexicon::from_words("t", ["ἄνθρωπος", "θάλασσα"]));
        let mut buf = Vec::new();
        idx.write_tsv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "ανθρωπος\tἄνθρωπος\nθαλασσα\tθάλασσα\n");
    }

    #[test]
    fn accuracy_examples() {
        let lex = Lexicon::from_words("t", ["καί", "λόγος"]);
        assert_eq!(dictionary_accuracy(&["καί", "λόγος", "ΧΧΧ"], &lex), 2.0 / 3.0);
        assert_eq!(dictionary_accuracy(&["καί", "λόγος"], &lex), 1.0);
        assert_eq!(dictionary_accuracy::<&str>(&[], &lex), 0.0);
        assert!(needs_retraining(0.59));
        assert!(!needs_retraining(0.60));
    }

    #[test]
    fn tokenizer_trims_punctuation() {
        assert_eq!(tokenize("«λόγος», 25 καί. —"), vec!["λόγος", "καί"]);
    }

    #[test]
    fn document_accuracy_greek_only() {
        let lex = Lexicon::from_words("t", ["λόγος"]);
        assert_eq!(document_accuracy("λόγος historiam", &lex, true), 1.0);
        assert_eq!(document_accuracy("λόγος historiam", &lex, false), 0.5);
    }
}
