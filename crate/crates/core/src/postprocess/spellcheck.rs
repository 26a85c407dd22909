//! The two lexicon-driven spellchecks.
//!
//! The unique-accent check re-accents words whose bare skeleton has exactly
//! one accented realization in the lexicon. The confusion check replaces a
//! commonly confused character (or two-character sequence) with its partner
//! when that turns an unknown word into a known one.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lexicon::{Lexicon, UniqueAccentIndex};
use crate::polytonic::{letter_count, normalize_nfc, strip_diacritics};

use super::PostprocessError;

/// Words need more than this many letters for the unique-accent check.
pub const DEFAULT_MIN_LETTERS: usize = 5;

const DEFAULT_TABLE: &str = include_str!("../../config/confusion_pairs.tsv");

/// Re-accents `word` from the index when it has more than five letters.
pub fn spellcheck_unique_accent(word: &str, idx: &UniqueAccentIndex) -> String {
    spellcheck_unique_accent_with(word, idx, DEFAULT_MIN_LETTERS)
}

/// As [`spellcheck_unique_accent`], with words of `min_letters` letters or
/// fewer left alone.
pub fn spellcheck_unique_accent_with(word: &str, idx: &UniqueAccentIndex, min_letters: usize) -> String {
    if letter_count(word) <= min_letters {
        return word.to_owned();
    }
    match idx.get(&strip_diacritics(word)) {
        Some(accented) if accented != word => accented.to_owned(),
        _ => word.to_owned(),
    }
}

/// How many substitutions a confusion correction may make.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfusionMode {
    /// One substitution at one position.
    #[default]
    Occurrence,
    /// One pair, substituted at any number of its occurrences. Single
    /// substitutions are tried first.
    PairType,
}

/// Occurrences beyond this are not considered in [`ConfusionMode::PairType`].
const MAX_PAIR_TYPE_SITES: usize = 10;

/// Ordered list of unordered confusion pairs; earlier pairs win.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionPairTable {
    pairs: Vec<(Vec<char>, Vec<char>)>,
}

impl Default for ConfusionPairTable {
    fn default() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled confusion table is valid")
    }
}

impl ConfusionPairTable {
    /// Builds a table from pairs. Sides are normalized to NFC and must be one
    /// or two characters; identical sides and repeated pairs (in either
    /// order) are rejected. Errors carry the 1-based pair number.
    pub fn new<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self, PostprocessError> {
        let mut table = Self { pairs: Vec::with_capacity(pairs.len()) };
        for (i, (a, b)) in pairs.iter().enumerate() {
            table.add(a.as_ref(), b.as_ref(), i + 1)?;
        }
        Ok(table)
    }

    fn add(&mut self, a: &str, b: &str, line: usize) -> Result<(), PostprocessError> {
        let err = |message: String| PostprocessError::ConfusionTable { line, message };
        let a: Vec<char> = normalize_nfc(a).chars().collect();
        let b: Vec<char> = normalize_nfc(b).chars().collect();
        for side in [&a, &b] {
            if side.is_empty() || side.len() > 2 {
                return Err(err(format!("side {:?} must be 1 or 2 characters", side.iter().collect::<String>())));
            }
        }
        if a == b {
            return Err(err("both sides are equal".into()));
        }
        if self.pairs.iter().any(|(x, y)| (x == &a && y == &b) || (x == &b && y == &a)) {
            return Err(err("duplicate pair".into()));
        }
        self.pairs.push((a, b));
        Ok(())
    }

    /// Parses the tab-separated table format: one pair per line, `#`
    /// comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, PostprocessError> {
        let mut table = Self { pairs: Vec::new() };
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
            let [a, b] = fields[..] else {
                return Err(PostprocessError::ConfusionTable {
                    line: i + 1,
                    message: format!("expected two tab-separated fields, found {}", fields.len()),
                });
            };
            table.add(a, b, i + 1)?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, PostprocessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PostprocessError::Config(format!("confusion table {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (String, String)> + '_ {
        self.pairs.iter().map(|(a, b)| (a.iter().collect(), b.iter().collect()))
    }
}

/// A place where one side of a pair can be swapped for the other.
struct Site<'a> {
    pos: usize,
    len: usize,
    with: &'a [char],
}

fn sites<'a>(chars: &[char], a: &'a [char], b: &'a [char]) -> Vec<Site<'a>> {
    let mut out = Vec::new();
    for pos in 0..chars.len() {
        if chars[pos..].starts_with(a) {
            out.push(Site { pos, len: a.len(), with: b });
        }
        if chars[pos..].starts_with(b) {
            out.push(Site { pos, len: b.len(), with: a });
        }
    }
    out
}

fn apply(chars: &[char], chosen: &[&Site]) -> String {
    let mut s = String::with_capacity(chars.len() * 2);
    let mut at = 0;
    for site in chosen {
        s.extend(&chars[at..site.pos]);
        s.extend(site.with);
        at = site.pos + site.len;
    }
    s.extend(&chars[at..]);
    normalize_nfc(&s)
}

/// Replaces one confused character if that yields a lexicon word.
pub fn spellcheck_confusion(word: &str, lex: &Lexicon, table: &ConfusionPairTable) -> String {
    spellcheck_confusion_with(word, lex, table, ConfusionMode::Occurrence)
}

/// Confusion correction. Known words are returned unchanged; otherwise the
/// first candidate found in the lexicon wins, scanning pairs in table order
/// and positions left to right.
pub fn spellcheck_confusion_with(word: &str, lex: &Lexicon, table: &ConfusionPairTable, mode: ConfusionMode) -> String {
    if lex.contains(word) {
        return word.to_owned();
    }
    let chars: Vec<char> = word.chars().collect();
    for (a, b) in &table.pairs {
        let sites = sites(&chars, a, b);
        if sites.is_empty() {
            continue;
        }
        let max_k = match mode {
            ConfusionMode::Occurrence => 1,
            ConfusionMode::PairType => sites.len().min(MAX_PAIR_TYPE_SITES),
        };
        let sites = &sites[..sites.len().min(MAX_PAIR_TYPE_SITES)];
        for k in 1..=max_k {
            if let Some(hit) = first_hit(&chars, sites, k, word, lex) {
                return hit;
            }
        }
    }
    word.to_owned()
}

/// First k-subset of non-overlapping sites (lexicographic order) whose
/// substitution gives a lexicon word.
fn first_hit(chars: &[char], sites: &[Site], k: usize, word: &str, lex: &Lexicon) -> Option<String> {
    let mut chosen: Vec<&Site> = Vec::with_capacity(k);
    fn rec<'s>(
        chars: &[char],
        sites: &'s [Site],
        start: usize,
        k: usize,
        chosen: &mut Vec<&'s Site<'s>>,
        word: &str,
        lex: &Lexicon,
    ) -> Option<String> {
        if chosen.len() == k {
            let cand = apply(chars, chosen);
            return (cand != word && lex.contains(&cand)).then_some(cand);
        }
        for i in start..sites.len() {
            if chosen.last().is_some_and(|prev| prev.pos + prev.len > sites[i].pos) {
                continue;
            }
            chosen.push(&sites[i]);
            let hit = rec(chars, sites, i + 1, k, chosen, word, lex);
            chosen.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
    rec(chars, sites, 0, k, &mut chosen, word, lex)
}
