use crate::docmodel::{Line, Page, Word};
use crate::polytonic::normalize_nfc;

use super::{CorrectionLog, CorrectionRecord, Rule, UnresolvedHyphen};

/// Hyphen-minus, hyphen, soft hyphen and double oblique hyphen.
pub const DEFAULT_HYPHENS: [char; 4] = ['\u{002D}', '\u{2010}', '\u{00AD}', '\u{2E17}'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyphenSet(Vec<char>);

impl Default for HyphenSet {
    fn default() -> Self {
        Self(DEFAULT_HYPHENS.to_vec())
    }
}

impl HyphenSet {
    pub fn new(chars: impl IntoIterator<Item = char>) -> Self {
        Self(chars.into_iter().collect())
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }

    /// A word ending in a hyphen with at least one letter before it.
    fn breaks(&self, text: &str) -> bool {
        let mut chars = text.chars();
        match chars.next_back() {
            Some(last) if self.0.contains(&last) => chars.any(char::is_alphabetic),
            _ => false,
        }
    }

    fn strip(&self, text: &str) -> String {
        let mut s = text.to_owned();
        s.pop();
        s
    }
}

fn is_number_token(text: &str) -> bool {
    let digits = text.strip_suffix('.').unwrap_or(text);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

/// Digits (optionally followed by `.`) placed first or last in their line.
pub fn is_marginal_number(word: &Word, line: &Line) -> bool {
    line.words.iter().position(|w| std::ptr::eq(w, word)).is_some_and(|i| is_marginal_at(line, i))
}

pub fn is_marginal_at(line: &Line, index: usize) -> bool {
    let n = line.words.len();
    index < n && (index == 0 || index + 1 == n) && is_number_token(&line.words[index].text)
}

fn last_content_word(line: &Line) -> Option<usize> {
    (0..line.words.len()).rev().find(|&i| !is_marginal_at(line, i))
}

fn first_content_word(line: &Line) -> Option<usize> {
    (0..line.words.len()).find(|&i| !is_marginal_at(line, i))
}

/// Joins words broken by a line-final hyphen with the first word of the next
/// line in the same region, with the default hyphen set.
pub fn dehyphenate(page: &Page) -> (Page, CorrectionLog) {
    dehyphenate_with(page, &HyphenSet::default())
}

/// Dehyphenation with an explicit hyphen set.
///
/// Marginal line numbers at either end of the two lines are skipped over and
/// stay in place. The joined word keeps the first fragment's bbox and
/// position; the second fragment is removed, and lines left empty are
/// dropped. Joining never crosses a region boundary.
pub fn dehyphenate_with(page: &Page, hyphens: &HyphenSet) -> (Page, CorrectionLog) {
    let mut out = page.clone();
    let mut log = CorrectionLog::default();
    let mut line_base = 0;

    for region in &mut out.regions {
        let lines = &mut region.lines;
        for i in 0..lines.len() {
            while let Some(wi) = last_content_word(&lines[i]) {
                if !hyphens.breaks(&lines[i].words[wi].text) {
                    break;
                }
                let next = (i + 1..lines.len())
                    .find(|&j| !lines[j].words.is_empty())
                    .and_then(|j| first_content_word(&lines[j]).map(|k| (j, k)));
                let Some((j, k)) = next else {
                    log.push_unresolved(UnresolvedHyphen {
                        page: page.id.clone(),
                        line: line_base + i,
                        word: wi,
                        text: lines[i].words[wi].text.clone(),
                    });
                    break;
                };
                let tail = lines[j].words.remove(k);
                let head = &mut lines[i].words[wi];
                let original = format!("{} {}", head.text, tail.text);
                head.text = normalize_nfc(&(hyphens.strip(&head.text) + &tail.text));
                log.push(CorrectionRecord {
                    page: page.id.clone(),
                    line: line_base + i,
                    word: wi,
                    original,
                    corrected: head.text.clone(),
                    rule: Rule::Dehyphenation,
                });
            }
        }
        line_base += lines.len();
        lines.retain(|l| !l.words.is_empty());
    }
    (out, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{BBox, Region, RegionType};

    fn line(y: u32, words: &[&str]) -> Line {
        let words = words
            .iter()
            .enumerate()
            .map(|(i, t)| Word::new(*t, BBox::new(i as u32 * 100, y, i as u32 * 100 + 80, y + 20).unwrap()))
            .collect();
        Line::from_words(words).unwrap()
    }

    fn page(regions: Vec<Vec<Line>>) -> Page {
        Page {
            id: "p".into(),
            image_dims: (2000, 2000),
            regions: regions
                .into_iter()
                .enumerate()
                .map(|(i, lines)| Region {
                    id: format!("r{i}"),
                    rtype: RegionType::unassigned(),
                    bbox: BBox::new(0, 0, 2000, 2000).unwrap(),
                    lines,
                })
                .collect(),
        }
    }

    fn texts(p: &Page) -> Vec<String> {
        p.lines().map(Line::text).collect()
    }

    #[test]
    fn marginal_number_rules() {
        let l = line(0, &["25", "μῆνιν", "25", "ἄειδε"]);
        assert!(is_marginal_number(&l.words[0], &l));
        assert!(!is_marginal_number(&l.words[2], &l));
        let l = line(0, &["25a", "x", "30."]);
        assert!(!is_marginal_number(&l.words[0], &l));
        assert!(is_marginal_number(&l.words[2], &l));
        // A word that is not in the line is never marginal
        let other = Word::new("25", BBox::new(0, 0, 1, 1).unwrap());
        assert!(!is_marginal_number(&other, &l));
    }

    /// Every combination of token shape and position.
    #[test]
    fn marginal_number_rule_table() {
        let shapes = [
            ("25", true),
            ("25.", true),
            ("1", true),
            ("25a", false),
            ("a25", false),
            (".", false),
            ("2.5", false),
            ("v.", false),
        ];
        for (shape, numeric) in shapes {
            for pos in 0..3 {
                let mut words = vec!["x", "y", "z"];
                words[pos] = shape;
                let l = line(0, &words);
                let edge = pos == 0 || pos == 2;
                assert_eq!(is_marginal_at(&l, pos), numeric && edge, "{shape} at {pos}");
            }
        }
    }

    #[test]
    fn joins_across_lines() {
        let (out, log) = dehyphenate(&page(vec![vec![line(0, &["μῆνιν", "ἄει-"]), line(30, &["δε", "θεά"])]]));
        assert_eq!(texts(&out), vec!["μῆνιν ἄειδε", "θεά"]);
        assert_eq!(log.len(), 1);
        assert_eq!(log.records()[0].corrected, "ἄειδε");
        assert_eq!(log.records()[0].original, "ἄει- δε");
        assert_eq!(log.records()[0].rule, Rule::Dehyphenation);
        // joined word keeps the first fragment's bbox
        assert_eq!(out.regions[0].lines[0].words[1].bbox, BBox::new(100, 0, 180, 20).unwrap());
    }

    #[test]
    fn skips_marginal_line_number() {
        let (out, _) = dehyphenate(&page(vec![vec![line(0, &["τοξό-"]), line(30, &["25", "την", "ἔχων"])]]));
        assert_eq!(texts(&out), vec!["τοξότην", "25 ἔχων"]);
        let (out, _) = dehyphenate(&page(vec![vec![line(0, &["τοξό-", "25"]), line(30, &["την", "ἔχων"])]]));
        assert_eq!(texts(&out), vec!["τοξότην 25", "ἔχων"]);
    }

    #[test]
    fn last_line_is_unresolved() {
        let p = page(vec![vec![line(0, &["μῆνιν", "ἄει-"])]]);
        let (out, log) = dehyphenate(&p);
        assert_eq!(out, p);
        assert!(log.is_empty());
        assert_eq!(log.unresolved().len(), 1);
        assert_eq!(log.unresolved()[0].text, "ἄει-");
    }

    #[test]
    fn does_not_cross_regions() {
        let p = page(vec![vec![line(0, &["ἄει-"])], vec![line(30, &["δε"])]]);
        let (out, log) = dehyphenate(&p);
        assert_eq!(out, p);
        assert_eq!(log.unresolved().len(), 1);
    }

    #[test]
    fn consumed_line_is_dropped_and_chain_continues() {
        let (out, log) =
            dehyphenate(&page(vec![vec![line(0, &["Ἀθη-"]), line(30, &["ναι-"]), line(60, &["ος", "καί"])]]));
        assert_eq!(texts(&out), vec!["Ἀθηναιος", "καί"]);
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn lone_dash_is_not_a_break() {
        let p = page(vec![vec![line(0, &["καί", "—"]), line(30, &["-", "x"])]]);
        assert_eq!(dehyphenate(&p).0, p);
        let p = page(vec![vec![line(0, &["καί", "-"]), line(30, &["x"])]]);
        assert_eq!(dehyphenate(&p).0, p);
    }

    #[test]
    fn other_hyphen_characters() {
        for h in DEFAULT_HYPHENS {
            let first = format!("ἄει{h}");
            let (out, _) = dehyphenate(&page(vec![vec![line(0, &[&first]), line(30, &["δε"])]]));
            assert_eq!(texts(&out), vec!["ἄειδε"], "{h:?}");
        }
        let only_ascii = HyphenSet::new(['-']);
        let p = page(vec![vec![line(0, &["ἄει\u{2E17}"]), line(30, &["δε"])]]);
        assert_eq!(dehyphenate_with(&p, &only_ascii).0, p);
    }
}
