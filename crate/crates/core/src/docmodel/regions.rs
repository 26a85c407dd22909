use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BBox, DocError, Line, Page, Region, RegionAnnotation, RegionType, Result, Word};

const DEFAULT_VOCABULARY: &str = include_str!("../../config/regions.toml");

/// Evaluation group a region type is reported under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionGroup {
    GreekTexts,
    CommentaryLike,
    LowGreekTexts,
    CriticalApparatus,
    StructuredTexts,
    Numbers,
}

impl RegionGroup {
    pub const ALL: [RegionGroup; 6] = [
        RegionGroup::GreekTexts,
        RegionGroup::CommentaryLike,
        RegionGroup::LowGreekTexts,
        RegionGroup::CriticalApparatus,
        RegionGroup::StructuredTexts,
        RegionGroup::Numbers,
    ];

    /// Short column header used in rendered tables.
    pub fn short_name(self) -> &'static str {
        match self {
            RegionGroup::GreekTexts => "Greek",
            RegionGroup::CommentaryLike => "Comm.",
            RegionGroup::LowGreekTexts => "Low Greek",
            RegionGroup::CriticalApparatus => "App. Crit.",
            RegionGroup::StructuredTexts => "Struct.",
            RegionGroup::Numbers => "Numbers",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            RegionGroup::GreekTexts => "greek_texts",
            RegionGroup::CommentaryLike => "commentary_like",
            RegionGroup::LowGreekTexts => "low_greek_texts",
            RegionGroup::CriticalApparatus => "critical_apparatus",
            RegionGroup::StructuredTexts => "structured_texts",
            RegionGroup::Numbers => "numbers",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabularyFile {
    #[serde(default)]
    label_attributes: Vec<String>,
    labels: BTreeMap<String, RegionGroup>,
}

/// The declared set of region-type labels and their evaluation groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionVocabulary {
    labels: BTreeMap<String, RegionGroup>,
    label_attributes: Vec<String>,
}

impl Default for RegionVocabulary {
    fn default() -> Self {
        Self::from_toml(DEFAULT_VOCABULARY).expect("bundled region vocabulary is valid")
    }
}

impl RegionVocabulary {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: VocabularyFile = toml::from_str(text).map_err(|e| DocError::Vocabulary(e.to_string()))?;
        if file.labels.contains_key(RegionType::UNASSIGNED) {
            return Err(DocError::Vocabulary(format!("label {:?} is reserved", RegionType::UNASSIGNED)));
        }
        if let Some(bad) = file.labels.keys().find(|l| l.is_empty() || l.chars().any(char::is_whitespace)) {
            return Err(DocError::Vocabulary(format!("invalid label {bad:?}")));
        }
        let label_attributes =
            if file.label_attributes.is_empty() { vec!["type".to_owned()] } else { file.label_attributes };
        Ok(Self { labels: file.labels, label_attributes })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| DocError::Vocabulary(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Validates a label. The reserved `unassigned` label is accepted.
    pub fn region_type(&self, label: &str) -> Result<RegionType> {
        if label == RegionType::UNASSIGNED || self.labels.contains_key(label) {
            Ok(RegionType::new_unchecked(label))
        } else {
            Err(DocError::UnknownRegionType(label.to_owned()))
        }
    }

    /// Evaluation group of a region type; `None` only for `unassigned`.
    pub fn group_of(&self, rtype: &RegionType) -> Option<RegionGroup> {
        self.labels.get(rtype.as_str()).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, RegionGroup)> {
        self.labels.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn label_attributes(&self) -> &[String] {
        &self.label_attributes
    }
}

fn clamp_to(bbox: &BBox, (w, h): (u32, u32)) -> BBox {
    let x1 = bbox.x1().min(w);
    let y1 = bbox.y1().min(h);
    BBox::new(bbox.x0().min(x1), bbox.y0().min(y1), x1, y1).expect("clamped bbox is ordered")
}

/// Index of the annotation whose rectangle contains the word's center. Among
/// nested candidates the smallest area wins; equal areas go to the earlier
/// annotation.
fn owner_of(word: &Word, rects: &[BBox]) -> Option<usize> {
    let c = word.bbox.center2();
    rects.iter().enumerate().filter(|(_, r)| r.contains_point2(c)).min_by_key(|(i, r)| (r.area(), *i)).map(|(i, _)| i)
}

/// Rebuilds the page's regions from annotation rectangles.
///
/// Each annotation becomes one region (kept even when empty); words whose
/// center no rectangle contains go to a trailing `unassigned` region. Lines
/// whose words land in different regions are split, each piece taking the
/// union of its words as bbox. Region bboxes grow to cover their lines.
pub fn assign_regions(page: &Page, annots: &[RegionAnnotation]) -> Page {
    let rects: Vec<BBox> = annots.iter().map(|a| clamp_to(&a.bbox, page.image_dims)).collect();
    let unassigned_slot = annots.len();
    let mut buckets: Vec<Vec<Line>> = vec![Vec::new(); annots.len() + 1];

    for line in page.lines() {
        let mut pieces: Vec<(usize, Vec<Word>)> = Vec::new();
        for word in &line.words {
            let slot = owner_of(word, &rects).unwrap_or(unassigned_slot);
            match pieces.iter_mut().find(|(s, _)| *s == slot) {
                Some((_, words)) => words.push(word.clone()),
                None => pieces.push((slot, vec![word.clone()])),
            }
        }
        let split = pieces.len() > 1;
        for (slot, words) in pieces {
            let piece = if split {
                Line::from_words(words).expect("pieces are non-empty")
            } else {
                Line { bbox: line.bbox, words }
            };
            buckets[slot].push(piece);
        }
    }

    let mut regions = Vec::with_capacity(buckets.len());
    let mut unassigned_lines = buckets.pop().unwrap_or_default();
    for (i, (lines, annot)) in buckets.into_iter().zip(annots).enumerate() {
        let bbox = lines.iter().fold(rects[i], |acc, l| acc.union(&l.bbox));
        regions.push(Region { id: format!("r{i}"), rtype: annot.rtype.clone(), bbox, lines });
    }
    // Lines on no rectangle keep their original order
    unassigned_lines.retain(|l| !l.words.is_empty());
    if let Some(bbox) = BBox::enclosing(unassigned_lines.iter().map(|l| &l.bbox)) {
        regions.push(Region {
            id: RegionType::UNASSIGNED.to_owned(),
            rtype: RegionType::unassigned(),
            bbox,
            lines: unassigned_lines,
        });
    }

    Page { id: page.id.clone(), image_dims: page.image_dims, regions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x0: u32, y0: u32, x1: u32, y1: u32) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    fn annot(vocab: &RegionVocabulary, label: &str, bbox: BBox) -> RegionAnnotation {
        RegionAnnotation { rtype: vocab.region_type(label).unwrap(), bbox }
    }

    fn one_line_page(words: Vec<Word>) -> Page {
        let line = Line::from_words(words).unwrap();
        Page {
            id: "p".into(),
            image_dims: (1000, 1000),
            regions: vec![Region {
                id: "unassigned".into(),
                rtype: RegionType::unassigned(),
                bbox: line.bbox,
                lines: vec![line],
            }],
        }
    }

    #[test]
    fn default_groups_follow_the_grouping_table() {
        let v = RegionVocabulary::default();
        let g = |l: &str| v.group_of(&v.region_type(l).unwrap());
        assert_eq!(g("footnote"), Some(RegionGroup::CommentaryLike));
        assert_eq!(g("commentary"), Some(RegionGroup::CommentaryLike));
        assert_eq!(g("translation"), Some(RegionGroup::LowGreekTexts));
        assert_eq!(g("introduction"), Some(RegionGroup::LowGreekTexts));
        assert_eq!(g("preface"), Some(RegionGroup::LowGreekTexts));
        assert_eq!(g("page_number"), Some(RegionGroup::Numbers));
        assert_eq!(g("line_number"), Some(RegionGroup::Numbers));
        assert_eq!(g("primary_text"), Some(RegionGroup::GreekTexts));
        assert_eq!(g("app_crit"), Some(RegionGroup::CriticalApparatus));
        for l in ["appendix", "bibliography", "index", "title", "table_of_contents"] {
            assert_eq!(g(l), Some(RegionGroup::StructuredTexts), "{l}");
        }
        assert_eq!(g("unassigned"), None);
    }

    #[test]
    fn default_vocabulary_is_surjective() {
        let v = RegionVocabulary::default();
        for group in RegionGroup::ALL {
            assert!(v.labels().any(|(_, g)| g == group), "{group:?}");
        }
        assert_eq!(v.labels().count(), 14);
    }

    #[test]
    fn unknown_label_rejected() {
        let v = RegionVocabulary::default();
        assert!(matches!(v.region_type("commentry"), Err(DocError::UnknownRegionType(l)) if l == "commentry"));
    }

    #[test]
    fn reserved_label_rejected_in_config() {
        let err = RegionVocabulary::from_toml("[labels]\nunassigned = \"numbers\"\n").unwrap_err();
        assert!(matches!(err, DocError::Vocabulary(_)));
    }

    #[test]
    fn word_goes_to_containing_rect() {
        let v = RegionVocabulary::default();
        let page = one_line_page(vec![Word::new("λόγος", b(10, 10, 60, 30))]);
        let out = assign_regions(&page, &[annot(&v, "commentary", b(0, 0, 100, 100))]);
        assert_eq!(out.regions.len(), 1);
        assert_eq!(out.regions[0].rtype.as_str(), "commentary");
        assert_eq!(out.regions[0].lines[0].words[0].text, "λόγος");
    }

    #[test]
    fn uncovered_word_is_unassigned() {
        let v = RegionVocabulary::default();
        let page = one_line_page(vec![Word::new("x", b(500, 500, 510, 510))]);
        let out = assign_regions(&page, &[annot(&v, "commentary", b(0, 0, 100, 100))]);
        assert_eq!(out.regions.len(), 2);
        assert!(out.regions[0].lines.is_empty());
        assert!(out.regions[1].rtype.is_unassigned());
        assert_eq!(out.regions[1].lines[0].words[0].text, "x");
    }

    #[test]
    fn split_line_across_regions() {
        let v = RegionVocabulary::default();
        let page = one_line_page(vec![
            Word::new("12", b(0, 0, 10, 10)),
            Word::new("μῆνιν", b(20, 0, 60, 10)),
            Word::new("ἄειδε", b(70, 0, 110, 10)),
        ]);
        let annots = [annot(&v, "line_number", b(0, 0, 15, 20)), annot(&v, "primary_text", b(16, 0, 200, 20))];
        let out = assign_regions(&page, &annots);
        assert_eq!(out.regions[0].lines[0].text(), "12");
        assert_eq!(out.regions[0].lines[0].bbox, b(0, 0, 10, 10));
        assert_eq!(out.regions[1].lines[0].text(), "μῆνιν ἄειδε");
        assert_eq!(out.regions[1].lines[0].bbox, b(20, 0, 110, 10));
        assert_eq!(out.word_count(), 3);
    }

    /// Exhaustive two-rectangle geometry: a point inside both of two nested
    /// or overlapping rectangles goes to the smaller one, whichever order the
    /// annotations come in.
    #[test]
    fn nested_rects_smallest_area_wins() {
        let v = RegionVocabulary::default();
        let coords = [0u32, 10, 20, 30];
        let mut rects = Vec::new();
        for &x0 in &coords {
            for &x1 in &coords {
                for &y0 in &coords {
                    for &y1 in &coords {
                        if x0 < x1 && y0 < y1 {
                            rects.push(b(x0, y0, x1, y1));
                        }
                    }
                }
            }
        }
        let mut checked = 0;
        for r1 in &rects {
            for r2 in &rects {
                for px in (0..=30).step_by(5) {
                    for py in (0..=30).step_by(5) {
                        let word = Word::new("w", b(px, py, px, py));
                        let page = one_line_page(vec![word]);
                        let annots = [annot(&v, "commentary", *r1), annot(&v, "footnote", *r2)];
                        let out = assign_regions(&page, &annots);
                        let pos = out.regions.iter().position(|r| !r.lines.is_empty()).unwrap();
                        let in1 = r1.contains_point2((2 * px as u64, 2 * py as u64));
                        let in2 = r2.contains_point2((2 * px as u64, 2 * py as u64));
                        let expected = match (in1, in2) {
                            (true, true) if r2.area() < r1.area() => 1,
                            (true, _) => 0,
                            (false, true) => 1,
                            (false, false) => 2,
                        };
                        assert_eq!(pos, expected, "{r1:?} {r2:?} ({px},{py})");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }
}
