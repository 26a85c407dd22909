use std::collections::BTreeMap;
use std::fmt;

use crate::docmodel::{Page, RegionGroup, RegionType, RegionVocabulary, Word};
use crate::polytonic::{countable_chars, letter_counts};

use super::{AlignmentResult, EvalError, Prf, align_words, levenshtein_chars, prf};

/// Where a count is reported. Words outside every typed region land in
/// `Unassigned`, so the groups plus `Unassigned` always sum to `Global`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Global,
    Group(RegionGroup),
    Unassigned,
}

impl Scope {
    pub fn key(self) -> &'static str {
        match self {
            Scope::Global => "global",
            Scope::Group(g) => g.key(),
            Scope::Unassigned => "unassigned",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scope::Global => "Global",
            Scope::Group(g) => g.short_name(),
            Scope::Unassigned => "Unassigned",
        }
    }

    /// Global, the six groups, then Unassigned.
    pub fn all() -> impl Iterator<Item = Scope> {
        std::iter::once(Scope::Global)
            .chain(RegionGroup::ALL.into_iter().map(Scope::Group))
            .chain(std::iter::once(Scope::Unassigned))
    }

    fn of(vocab: &RegionVocabulary, rtype: &RegionType) -> Scope {
        vocab.group_of(rtype).map_or(Scope::Unassigned, Scope::Group)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Raw error counts of one scope. Every rate is derived from these, so
/// tallies of pages and commentaries can be pooled by addition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub gt_chars: u64,
    pub edits: u64,
    pub gt_words: u64,
    pub word_errors: u64,
    pub greek_letters: u64,
    pub latin_letters: u64,
    pub gt_tokens: BTreeMap<String, u64>,
    pub ocr_tokens: BTreeMap<String, u64>,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.gt_chars += other.gt_chars;
        self.edits += other.edits;
        self.gt_words += other.gt_words;
        self.word_errors += other.word_errors;
        self.greek_letters += other.greek_letters;
        self.latin_letters += other.latin_letters;
        for (t, n) in &other.gt_tokens {
            *self.gt_tokens.entry(t.clone()).or_default() += n;
        }
        for (t, n) in &other.ocr_tokens {
            *self.ocr_tokens.entry(t.clone()).or_default() += n;
        }
    }

    /// Edits over GT characters, capped at 1; 0 when the scope has no GT.
    pub fn cer(&self) -> f64 {
        capped_ratio(self.edits, self.gt_chars)
    }

    pub fn wer(&self) -> f64 {
        capped_ratio(self.word_errors, self.gt_words)
    }

    pub fn nld(&self) -> f64 {
        super::nld_from_cer(self.cer())
    }

    pub fn bag_of_words(&self) -> Prf {
        let matched = self.gt_tokens.iter().map(|(t, g)| (*g).min(self.ocr_tokens.get(t).copied().unwrap_or(0))).sum();
        prf(matched, self.gt_tokens.values().sum(), self.ocr_tokens.values().sum())
    }

    pub fn greek_pct(&self) -> f64 {
        capped_ratio(self.greek_letters, self.greek_letters + self.latin_letters)
    }

    fn add_gt(&mut self, w: &Word) {
        self.gt_chars += countable_chars(&w.text) as u64;
        self.gt_words += 1;
        let (g, l) = letter_counts(&w.text);
        self.greek_letters += g as u64;
        self.latin_letters += l as u64;
        *self.gt_tokens.entry(w.text.clone()).or_default() += 1;
    }

    fn add_ocr(&mut self, w: &Word) {
        *self.ocr_tokens.entry(w.text.clone()).or_default() += 1;
    }
}

fn capped_ratio(n: u64, d: u64) -> f64 {
    if d == 0 { 0.0 } else { (n as f64 / d as f64).min(1.0) }
}

/// The codepoints that are counted and compared.
fn units(text: &str) -> Vec<char> {
    text.chars().filter(|c| !c.is_whitespace() && !c.is_control()).collect()
}

/// Tallies keyed by scope. Scopes without any word are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScopeTallies(BTreeMap<Scope, Tally>);

impl ScopeTallies {
    pub fn get(&self, scope: Scope) -> Option<&Tally> {
        self.0.get(&scope)
    }

    /// The tally of `scope`, empty if nothing was counted there.
    pub fn tally(&self, scope: Scope) -> Tally {
        self.0.get(&scope).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Scope, &Tally)> {
        self.0.iter().map(|(s, t)| (*s, t))
    }

    pub fn merge(&mut self, other: &ScopeTallies) {
        for (s, t) in &other.0 {
            self.0.entry(*s).or_default().merge(t);
        }
    }

    fn entry(&mut self, scope: Scope) -> &mut Tally {
        self.0.entry(scope).or_default()
    }

    /// Applies `f` to the global tally and to the tally of `scope`.
    fn both(&mut self, scope: Scope, f: impl Fn(&mut Tally)) {
        f(self.entry(Scope::Global));
        f(self.entry(scope));
    }
}

impl FromIterator<(Scope, Tally)> for ScopeTallies {
    fn from_iter<I: IntoIterator<Item = (Scope, Tally)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Per-page alignment and the counts derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct PageEvaluation {
    pub page_id: String,
    pub alignment: AlignmentResult,
    pub tallies: ScopeTallies,
}

/// Aligns `ocr` to `gt` and counts errors per scope.
///
/// Matched and unmatched GT words count in the scope of their GT region.
/// An unmatched OCR word counts in the scope of the smallest typed GT region
/// holding its center, or in `Unassigned` when there is none.
pub fn evaluate_page(
    gt: &Page,
    ocr: &Page,
    vocab: &RegionVocabulary,
    iou_threshold: f64,
) -> Result<PageEvaluation, EvalError> {
    let alignment = align_words(gt, ocr, iou_threshold)?;
    let gt_words: Vec<(Scope, &Word)> = gt.typed_words().map(|(t, w)| (Scope::of(vocab, t), w)).collect();
    let ocr_words: Vec<&Word> = ocr.words().collect();
    let mut tallies = ScopeTallies::default();

    for &(scope, w) in &gt_words {
        tallies.both(scope, |t| t.add_gt(w));
    }
    for m in &alignment.matched {
        let (scope, g) = gt_words[m.gt];
        let o = ocr_words[m.ocr];
        let edits = levenshtein_chars(&units(&g.text), &units(&o.text)) as u64;
        tallies.both(scope, |t| {
            t.edits += edits;
            t.word_errors += u64::from(g.text != o.text);
            t.add_ocr(o);
        });
    }
    for &i in &alignment.unmatched_gt {
        let (scope, g) = gt_words[i];
        let n = countable_chars(&g.text) as u64;
        tallies.both(scope, |t| {
            t.edits += n;
            t.word_errors += 1;
        });
    }
    for &j in &alignment.unmatched_ocr {
        let o = ocr_words[j];
        let scope = insertion_scope(gt, vocab, o);
        let n = countable_chars(&o.text) as u64;
        tallies.both(scope, |t| {
            t.edits += n;
            t.word_errors += 1;
            t.add_ocr(o);
        });
    }
    Ok(PageEvaluation { page_id: gt.id.clone(), alignment, tallies })
}

fn insertion_scope(gt: &Page, vocab: &RegionVocabulary, w: &Word) -> Scope {
    let c = w.bbox.center2();
    gt.regions
        .iter()
        .filter_map(|r| vocab.group_of(&r.rtype).map(|g| (r, g)))
        .filter(|(r, _)| r.bbox.contains_point2(c))
        .min_by_key(|(r, _)| r.bbox.area())
        .map_or(Scope::Unassigned, |(_, g)| Scope::Group(g))
}

/// CER of one scope of a page; 0 with a warning when the scope holds no GT.
pub fn region_cer(eval: &PageEvaluation, scope: Scope) -> f64 {
    let t = eval.tallies.tally(scope);
    if t.gt_chars == 0 {
        log::warn!("page {}: no GT characters in scope {scope}, CER taken as 0", eval.page_id);
    }
    t.cer()
}

pub fn wer(eval: &PageEvaluation, scope: Scope) -> f64 {
    eval.tallies.tally(scope).wer()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CharStats {
    pub char_count: u64,
    pub greek_letters: u64,
    pub latin_letters: u64,
}

impl CharStats {
    pub fn greek_pct(&self) -> f64 {
        capped_ratio(self.greek_letters, self.greek_letters + self.latin_letters)
    }

    pub fn merge(&mut self, other: &CharStats) {
        self.char_count += other.char_count;
        self.greek_letters += other.greek_letters;
        self.latin_letters += other.latin_letters;
    }
}

/// Character counts and Greek share per scope. Every scope is present,
/// zeroed when empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats(BTreeMap<Scope, CharStats>);

impl Default for CorpusStats {
    fn default() -> Self {
        Self(Scope::all().map(|s| (s, CharStats::default())).collect())
    }
}

impl CorpusStats {
    pub fn get(&self, scope: Scope) -> CharStats {
        self.0.get(&scope).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Scope, CharStats)> + '_ {
        self.0.iter().map(|(s, c)| (*s, *c))
    }

    pub fn merge(&mut self, other: &CorpusStats) {
        for (s, c) in &other.0 {
            self.0.entry(*s).or_default().merge(c);
        }
    }
}

pub fn corpus_stats<'a>(pages: impl IntoIterator<Item = &'a Page>, vocab: &RegionVocabulary) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for page in pages {
        for (rtype, w) in page.typed_words() {
            let (g, l) = letter_counts(&w.text);
            let add = CharStats {
                char_count: countable_chars(&w.text) as u64,
                greek_letters: g as u64,
                latin_letters: l as u64,
            };
            stats.0.entry(Scope::Global).or_default().merge(&add);
            stats.0.entry(Scope::of(vocab, rtype)).or_default().merge(&add);
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{BBox, Line, Region};

    fn b(x0: u32, y0: u32, x1: u32, y1: u32) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    fn region(id: &str, label: &str, bbox: BBox, words: &[(&str, BBox)]) -> Region {
        let vocab = RegionVocabulary::default();
        let words: Vec<Word> = words.iter().map(|(t, bb)| Word::new(*t, *bb)).collect();
        Region {
            id: id.into(),
            rtype: vocab.region_type(label).unwrap(),
            bbox,
            lines: Line::from_words(words).into_iter().collect(),
        }
    }

    fn gt_page() -> Page {
        let mut p = Page::empty("p1", (1000, 1000));
        p.regions.push(region(
            "r0",
            "primary_text",
            b(0, 0, 500, 100),
            &[("μῆνιν", b(10, 10, 90, 40)), ("ἄειδε", b(100, 10, 190, 40))],
        ));
        p.regions.push(region("r1", "commentary", b(0, 200, 500, 300), &[("abcde", b(10, 210, 90, 240))]));
        p
    }

    fn eval(gt: &Page, ocr: &Page) -> PageEvaluation {
        evaluate_page(gt, ocr, &RegionVocabulary::default(), 0.3).unwrap()
    }

    const GREEK: Scope = Scope::Group(RegionGroup::GreekTexts);
    const COMM: Scope = Scope::Group(RegionGroup::CommentaryLike);

    #[test]
    fn perfect_copy() {
        let gt = gt_page();
        let e = eval(&gt, &gt);
        for s in [Scope::Global, GREEK, COMM] {
            let t = e.tallies.tally(s);
            assert_eq!((t.cer(), t.wer(), t.bag_of_words().f1, t.nld()), (0.0, 0.0, 1.0, 1.0));
        }
    }

    #[test]
    fn single_substitution() {
        let gt = gt_page();
        let mut ocr = gt.clone();
        ocr.regions[1].lines[0].words[0].text = "abxde".into();
        let e = eval(&gt, &ocr);
        assert_eq!(region_cer(&e, COMM), 0.2);
        assert_eq!(wer(&e, COMM), 1.0);
        assert_eq!(region_cer(&e, GREEK), 0.0);
        assert_eq!(region_cer(&e, Scope::Global), 1.0 / 15.0);
    }

    #[test]
    fn empty_ocr_is_capped() {
        let gt = gt_page();
        let e = eval(&gt, &Page::empty("p1", (1000, 1000)));
        assert_eq!(region_cer(&e, Scope::Global), 1.0);
        assert_eq!(wer(&e, Scope::Global), 1.0);
        assert_eq!(e.tallies.tally(Scope::Global).bag_of_words().f1, 0.0);
    }

    #[test]
    fn insertion_outside_any_region_counts_globally() {
        let gt = gt_page();
        let mut ocr = gt.clone();
        ocr.regions.push(region("x", "commentary", b(600, 600, 700, 700), &[("xyz", b(600, 600, 700, 700))]));
        let e = eval(&gt, &ocr);
        assert_eq!(e.tallies.tally(Scope::Global).edits, 3);
        assert_eq!(e.tallies.tally(Scope::Unassigned).edits, 3);
        assert_eq!(e.tallies.tally(COMM).edits, 0);
        // 1 error word over 3 GT words
        assert!((wer(&e, Scope::Global) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn insertion_inside_a_region_counts_there() {
        let gt = gt_page();
        let mut ocr = gt.clone();
        ocr.regions.push(region("x", "commentary", b(300, 210, 400, 240), &[("xyz", b(300, 210, 400, 240))]));
        let e = eval(&gt, &ocr);
        assert_eq!(e.tallies.tally(COMM).edits, 3);
        assert_eq!(e.tallies.tally(Scope::Unassigned).edits, 0);
    }

    #[test]
    fn groups_and_unassigned_sum_to_global() {
        let mut gt = gt_page();
        gt.regions.push(region("u", "unassigned", b(0, 500, 100, 540), &[("loose", b(0, 500, 100, 540))]));
        let mut ocr = gt.clone();
        ocr.regions[0].lines[0].words[0].text = "μηνιν".into();
        ocr.regions.push(region("x", "commentary", b(600, 600, 700, 700), &[("xyz", b(600, 600, 700, 700))]));
        let e = eval(&gt, &ocr);
        let global = e.tallies.tally(Scope::Global);
        let mut sum = Tally::default();
        for s in Scope::all().skip(1) {
            sum.merge(&e.tallies.tally(s));
        }
        assert_eq!(sum, global);
    }

    #[test]
    fn empty_scope_cer_is_zero() {
        let gt = gt_page();
        let e = eval(&gt, &gt);
        assert_eq!(region_cer(&e, Scope::Group(RegionGroup::Numbers)), 0.0);
    }

    #[test]
    fn corpus_stats_counts() {
        let stats = corpus_stats([&gt_page()], &RegionVocabulary::default());
        assert_eq!(stats.get(Scope::Global).char_count, 15);
        assert_eq!(stats.get(GREEK).char_count, 10);
        assert_eq!(stats.get(GREEK).greek_pct(), 1.0);
        assert!((stats.get(Scope::Global).greek_pct() - 10.0 / 15.0).abs() < 1e-12);
        let empty = corpus_stats([], &RegionVocabulary::default());
        assert!(empty.iter().all(|(_, c)| c == CharStats::default()));
    }
}
