//! Page → region → line → word document model with pixel bounding boxes.
//!
//! Pages come from hOCR files ([`parse_hocr`]) or from the canonical JSON
//! form ([`read_canonical`]); region types come from rectangle annotations
//! ([`parse_region_annotations`]) and are attached with [`assign_regions`].

mod annotations;
mod canonical;
mod hocr;
mod regions;

pub use annotations::{RegionAnnotation, parse_region_annotations};
pub use canonical::{CANONICAL_VERSION, read_canonical, read_canonical_with, write_canonical};
pub use hocr::{HocrParse, parse_hocr};
pub use regions::{RegionGroup, RegionVocabulary, assign_regions};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed markup at {path}: {message}")]
    Markup { path: String, message: String },
    #[error("hOCR document has no ocr_page element with a bbox")]
    MissingPageDims,
    #[error("invalid annotation file at {path}: {message}")]
    Annotation { path: String, message: String },
    #[error("unknown region type {0:?}")]
    UnknownRegionType(String),
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid region vocabulary: {0}")]
    Vocabulary(String),
}

pub type Result<T, E = DocError> = std::result::Result<T, E>;

/// Axis-aligned pixel rectangle, origin top-left, `x1`/`y1` exclusive.
///
/// Serialized as `[x0, y0, x1, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct BBox {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidBBox(pub [u32; 4]);

impl fmt::Display for InvalidBBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, y0, x1, y1] = self.0;
        write!(f, "inverted bbox [{x0}, {y0}, {x1}, {y1}]: need x0 <= x1 and y0 <= y1")
    }
}

impl std::error::Error for InvalidBBox {}

impl TryFrom<[u32; 4]> for BBox {
    type Error = InvalidBBox;

    fn try_from(v: [u32; 4]) -> Result<Self, InvalidBBox> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [u32; 4] {
    fn from(b: BBox) -> Self {
        [b.x0, b.y0, b.x1, b.y1]
    }
}

impl BBox {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Result<Self, InvalidBBox> {
        if x0 > x1 || y0 > y1 {
            return Err(InvalidBBox([x0, y0, x1, y1]));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn x0(&self) -> u32 {
        self.x0
    }
    pub fn y0(&self) -> u32 {
        self.y0
    }
    pub fn x1(&self) -> u32 {
        self.x1
    }
    pub fn y1(&self) -> u32 {
        self.y1
    }
    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }
    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    /// Center in doubled coordinates, so it stays integral.
    pub fn center2(&self) -> (u64, u64) {
        (u64::from(self.x0) + u64::from(self.x1), u64::from(self.y0) + u64::from(self.y1))
    }

    /// Whether the point given in doubled coordinates lies inside the closed
    /// rectangle.
    pub fn contains_point2(&self, (px2, py2): (u64, u64)) -> bool {
        2 * u64::from(self.x0) <= px2
            && px2 <= 2 * u64::from(self.x1)
            && 2 * u64::from(self.y0) <= py2
            && py2 <= 2 * u64::from(self.y1)
    }

    pub fn contains(&self, other: &BBox) -> bool {
        self.x0 <= other.x0 && self.y0 <= other.y0 && self.x1 >= other.x1 && self.y1 >= other.y1
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        let w = self.x1.min(other.x1).saturating_sub(self.x0.max(other.x0));
        let h = self.y1.min(other.y1).saturating_sub(self.y0.max(other.y0));
        u64::from(w) * u64::from(h)
    }

    /// Intersection over union. Identical boxes score 1 even when degenerate.
    pub fn iou(&self, other: &BBox) -> f64 {
        if self == other {
            return 1.0;
        }
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union == 0 { 0.0 } else { inter as f64 / union as f64 }
    }

    /// Union of all boxes, `None` for an empty iterator.
    pub fn enclosing<'a>(boxes: impl IntoIterator<Item = &'a BBox>) -> Option<BBox> {
        boxes.into_iter().fold(None, |acc: Option<BBox>, b| {
            Some(match acc {
                Some(a) => a.union(b),
                None => *b,
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub text: String,
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl Word {
    pub fn new(text: impl Into<String>, bbox: BBox) -> Self {
        Self { text: text.into(), bbox, confidence: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub bbox: BBox,
    pub words: Vec<Word>,
}

impl Line {
    /// A line whose bbox is the union of its words. `None` if `words` is empty.
    pub fn from_words(words: Vec<Word>) -> Option<Self> {
        let bbox = BBox::enclosing(words.iter().map(|w| &w.bbox))?;
        Some(Self { bbox, words })
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&w.text);
        }
        s
    }
}

/// Region type label. The synthetic [`RegionType::UNASSIGNED`] label holds
/// words no annotation covers; every other label must come from a
/// [`RegionVocabulary`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionType(String);

impl RegionType {
    pub const UNASSIGNED: &'static str = "unassigned";

    pub fn unassigned() -> Self {
        Self(Self::UNASSIGNED.to_owned())
    }

    /// Unchecked constructor; see [`RegionVocabulary::region_type`].
    pub(crate) fn new_unchecked(label: impl Into<String>) -> Self {
        Self(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_unassigned(&self) -> bool {
        self.0 == Self::UNASSIGNED
    }
}

impl fmt::Display for RegionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    #[serde(rename = "type")]
    pub rtype: RegionType,
    pub bbox: BBox,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub id: String,
    /// `(width, height)` in pixels.
    pub image_dims: (u32, u32),
    pub regions: Vec<Region>,
}

impl Page {
    pub fn empty(id: impl Into<String>, image_dims: (u32, u32)) -> Self {
        Self { id: id.into(), image_dims, regions: Vec::new() }
    }

    pub fn lines(&self) -> impl Iterator<Item = &Line> {
        self.regions.iter().flat_map(|r| r.lines.iter())
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.lines().flat_map(|l| l.words.iter())
    }

    /// Words paired with the type of the region holding them.
    pub fn typed_words(&self) -> impl Iterator<Item = (&RegionType, &Word)> {
        self.regions.iter().flat_map(|r| r.lines.iter().flat_map(move |l| l.words.iter().map(move |w| (&r.rtype, w))))
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    /// Whitespace-joined text of all words in document order.
    pub fn text(&self) -> String {
        self.lines().map(Line::text).collect::<Vec<_>>().join("\n")
    }
}
