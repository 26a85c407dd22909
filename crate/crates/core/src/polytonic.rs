//! Unicode handling for polytonic Greek.
//!
//! Every text comparison in this crate operates on NFC strings, and the
//! counting unit is the NFC codepoint: a precomposed accented letter such as
//! `ᾤ` is one character. Diacritics are analysed by canonical decomposition.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_normalization::char::{canonical_combining_class, is_combining_mark};

/// Coarse script class of a codepoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Script {
    Greek,
    Latin,
    Digit,
    /// Punctuation and symbols.
    Punctuation,
    /// Whitespace, controls, combining marks and letters of other scripts.
    Other,
}

/// A diacritic that can sit on a Greek letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diacritic {
    SmoothBreathing,
    RoughBreathing,
    Acute,
    Grave,
    Circumflex,
    IotaSubscript,
    Diaeresis,
    Macron,
    Breve,
}

impl Diacritic {
    pub const ALL: [Diacritic; 9] = [
        Diacritic::SmoothBreathing,
        Diacritic::RoughBreathing,
        Diacritic::Acute,
        Diacritic::Grave,
        Diacritic::Circumflex,
        Diacritic::IotaSubscript,
        Diacritic::Diaeresis,
        Diacritic::Macron,
        Diacritic::Breve,
    ];

    /// The combining codepoint that encodes this diacritic in NFD.
    pub fn combining_char(self) -> char {
        match self {
            Diacritic::SmoothBreathing => '\u{0313}',
            Diacritic::RoughBreathing => '\u{0314}',
            Diacritic::Acute => '\u{0301}',
            Diacritic::Grave => '\u{0300}',
            Diacritic::Circumflex => '\u{0342}',
            Diacritic::IotaSubscript => '\u{0345}',
            Diacritic::Diaeresis => '\u{0308}',
            Diacritic::Macron => '\u{0304}',
            Diacritic::Breve => '\u{0306}',
        }
    }

    fn stacking_rank(self) -> u8 {
        match self {
            Diacritic::Macron => 0,
            Diacritic::Breve => 1,
            Diacritic::Diaeresis => 2,
            Diacritic::SmoothBreathing => 3,
            Diacritic::RoughBreathing => 4,
            Diacritic::Acute => 5,
            Diacritic::Grave => 6,
            Diacritic::Circumflex => 7,
            Diacritic::IotaSubscript => 8,
        }
    }

    /// Inverse of [`Diacritic::combining_char`]. Only NFD forms are recognised,
    /// so the Greek-specific aliases (U+0341, U+0343, U+0344) must be
    /// decomposed first.
    pub fn from_combining_char(c: char) -> Option<Self> {
        Some(match c {
            '\u{0313}' => Diacritic::SmoothBreathing,
            '\u{0314}' => Diacritic::RoughBreathing,
            '\u{0301}' => Diacritic::Acute,
            '\u{0300}' => Diacritic::Grave,
            '\u{0342}' => Diacritic::Circumflex,
            '\u{0345}' => Diacritic::IotaSubscript,
            '\u{0308}' => Diacritic::Diaeresis,
            '\u{0304}' => Diacritic::Macron,
            '\u{0306}' => Diacritic::Breve,
            _ => return None,
        })
    }
}

/// A Greek letter split into its bare base letter and the diacritics on it.
///
/// `marks` keeps the canonical (NFD) order, so two profiles compare equal
/// exactly when the letters they describe are canonically equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiacriticProfile {
    pub base: char,
    pub marks: Vec<Diacritic>,
}

impl DiacriticProfile {
    /// Decomposes a single Greek letter, given either precomposed or as a
    /// base letter followed by combining marks.
    ///
    /// Returns `None` if the input is not one Greek base letter followed only
    /// by known, non-repeated diacritics.
    pub fn decompose(letter: &str) -> Option<Self> {
        let mut chars = letter.nfd();
        let base = chars.next()?;
        if script_of(base) != Script::Greek {
            return None;
        }
        let mut marks = Vec::new();
        for c in chars {
            let mark = Diacritic::from_combining_char(c)?;
            if marks.contains(&mark) {
                return None;
            }
            marks.push(mark);
        }
        Some(Self { base, marks })
    }

    /// Builds a profile from a base letter and marks in any order. Marks are
    /// stacked in the conventional order (quantity, diaeresis, breathing,
    /// accent, iota subscript); duplicates are rejected.
    pub fn new(base: char, marks: &[Diacritic]) -> Option<Self> {
        let mut sorted = marks.to_vec();
        sorted.sort_by_key(|m| m.stacking_rank());
        let mut s = String::new();
        s.push(base);
        s.extend(sorted.iter().map(|m| m.combining_char()));
        let profile = Self::decompose(&s)?;
        (profile.marks.len() == marks.len()).then_some(profile)
    }

    /// The NFC string for this letter. Usually a single codepoint, but
    /// combinations without a precomposed form (e.g. macron + acute) keep
    /// trailing combining marks.
    pub fn compose(&self) -> String {
        let mut s = String::with_capacity(4 * (1 + self.marks.len()));
        s.push(self.base);
        s.extend(self.marks.iter().map(|m| m.combining_char()));
        s.nfc().collect()
    }

    pub fn has(&self, mark: Diacritic) -> bool {
        self.marks.contains(&mark)
    }
}

/// Canonical composition (NFC).
pub fn normalize_nfc(text: &str) -> String {
    text.nfc().collect()
}

pub fn is_nfc(text: &str) -> bool {
    unicode_normalization::is_nfc(text)
}

fn in_greek_blocks(ch: char) -> bool {
    matches!(ch, '\u{0370}'..='\u{03FF}' | '\u{1F00}'..='\u{1FFF}')
}

fn in_latin_blocks(ch: char) -> bool {
    matches!(
        ch,
        '\u{0041}'..='\u{005A}'
            | '\u{0061}'..='\u{007A}'
            | '\u{00AA}'
            | '\u{00BA}'
            | '\u{00C0}'..='\u{024F}'
            | '\u{0250}'..='\u{02AF}'
            | '\u{1D00}'..='\u{1DBF}'
            | '\u{1E00}'..='\u{1EFF}'
            | '\u{2C60}'..='\u{2C7F}'
            | '\u{A720}'..='\u{A7FF}'
            | '\u{AB30}'..='\u{AB6F}'
            | '\u{FB00}'..='\u{FB06}'
            | '\u{FF21}'..='\u{FF3A}'
            | '\u{FF41}'..='\u{FF5A}'
    )
}

/// Classifies a codepoint. Total: every `char` lands in exactly one class.
pub fn script_of(ch: char) -> Script {
    if ch.is_alphabetic() {
        if in_greek_blocks(ch) {
            // U+0345 is alphabetic but a combining mark
            if is_combining_mark(ch) {
                return Script::Other;
            }
            return Script::Greek;
        }
        if in_latin_blocks(ch) {
            return Script::Latin;
        }
        if ch.is_numeric() {
            return Script::Digit;
        }
        return Script::Other;
    }
    if ch.is_numeric() {
        return Script::Digit;
    }
    if ch.is_whitespace() || ch.is_control() || is_combining_mark(ch) {
        return Script::Other;
    }
    if matches!(ch, '\u{200B}'..='\u{200F}' | '\u{2060}'..='\u{206F}' | '\u{FEFF}') {
        return Script::Other;
    }
    Script::Punctuation
}

pub fn is_greek_letter(ch: char) -> bool {
    script_of(ch) == Script::Greek
}

/// Removes every diacritic carried by a Greek letter. Combining marks on
/// non-Greek characters survive, and final sigma stays final sigma.
pub fn strip_diacritics(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut on_greek = false;
    for c in word.nfd() {
        if canonical_combining_class(c) != 0 || is_combining_mark(c) {
            if !on_greek {
                out.push(c);
            }
            continue;
        }
        on_greek = is_greek_letter(c);
        out.push(c);
    }
    normalize_nfc(&out)
}

/// Greek letters over Greek plus Latin letters; 0 when there are no letters.
pub fn greek_ratio(text: &str) -> f64 {
    let (greek, latin) = letter_counts(text);
    if greek + latin == 0 { 0.0 } else { greek as f64 / (greek + latin) as f64 }
}

/// `(greek, latin)` letter counts.
pub fn letter_counts(text: &str) -> (usize, usize) {
    text.chars().fold((0, 0), |(g, l), c| match script_of(c) {
        Script::Greek => (g + 1, l),
        Script::Latin => (g, l + 1),
        _ => (g, l),
    })
}

/// Number of letters in `text`, in any script.
pub fn letter_count(text: &str) -> usize {
    text.chars().filter(|c| c.is_alphabetic() && !is_combining_mark(*c)).count()
}

/// Counting unit for error rates and corpus statistics: every NFC codepoint
/// except whitespace and controls. Punctuation is counted.
pub fn countable_chars(text: &str) -> usize {
    text.chars().filter(|c| !c.is_whitespace() && !c.is_control()).count()
}

/// Splits a token into leading non-letters, the letter-bounded core, and
/// trailing non-letters. `("«λόγος»,")` gives `("«", "λόγος", "»,")`.
pub fn split_affixes(token: &str) -> (&str, &str, &str) {
    let is_letter = |c: char| c.is_alphabetic() || is_combining_mark(c);
    let start = token.find(|c: char| c.is_alphabetic() && !is_combining_mark(c));
    let Some(start) = start else {
        return (token, "", "");
    };
    let end =
        token.char_indices().rev().find(|(_, c)| is_letter(*c)).map(|(i, c)| i + c.len_utf8()).unwrap_or(token.len());
    (&token[..start], &token[start..end], &token[end..])
}
