use std::cmp::Ordering;

use crate::docmodel::{BBox, Page};

use super::EvalError;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub gt: usize,
    pub ocr: usize,
    pub iou: f64,
}

/// One-to-one word matching between two pages. Indices refer to the
/// `Page::words()` order of each page.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlignmentResult {
    pub matched: Vec<MatchedPair>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_ocr: Vec<usize>,
}

impl AlignmentResult {
    /// The same alignment seen from the other side.
    pub fn swapped(&self) -> Self {
        Self {
            matched: self.matched.iter().map(|m| MatchedPair { gt: m.ocr, ocr: m.gt, iou: m.iou }).collect(),
            unmatched_gt: self.unmatched_ocr.clone(),
            unmatched_ocr: self.unmatched_gt.clone(),
        }
    }
}

/// Greedy matching by descending IoU over word pairs with IoU at least
/// `threshold`. Ties are broken on the two bboxes taken as an unordered
/// pair, so swapping the pages yields the mirrored matching.
pub fn align_words(gt: &Page, ocr: &Page, threshold: f64) -> Result<AlignmentResult, EvalError> {
    if gt.image_dims != ocr.image_dims {
        return Err(EvalError::DimsMismatch { page: gt.id.clone(), gt: gt.image_dims, ocr: ocr.image_dims });
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(EvalError::BadThreshold(threshold));
    }
    let gt_boxes: Vec<BBox> = gt.words().map(|w| w.bbox).collect();
    let ocr_boxes: Vec<BBox> = ocr.words().map(|w| w.bbox).collect();

    let mut candidates = Vec::new();
    for (i, g) in gt_boxes.iter().enumerate() {
        for (j, o) in ocr_boxes.iter().enumerate() {
            if g.intersection_area(o) == 0 && g != o {
                continue;
            }
            let iou = g.iou(o);
            if iou >= threshold {
                candidates.push(MatchedPair { gt: i, ocr: j, iou });
            }
        }
    }
    let key = |m: &MatchedPair| {
        let (a, b): ([u32; 4], [u32; 4]) = (gt_boxes[m.gt].into(), ocr_boxes[m.ocr].into());
        if a <= b { (a, b) } else { (b, a) }
    };
    candidates.sort_by(|x, y| {
        y.iou
            .partial_cmp(&x.iou)
            .unwrap_or(Ordering::Equal)
            .then_with(|| key(x).cmp(&key(y)))
            .then_with(|| (x.gt, x.ocr).cmp(&(y.gt, y.ocr)))
    });

    let mut gt_used = vec![false; gt_boxes.len()];
    let mut ocr_used = vec![false; ocr_boxes.len()];
    let mut matched = Vec::new();
    for c in candidates {
        if !gt_used[c.gt] && !ocr_used[c.ocr] {
            gt_used[c.gt] = true;
            ocr_used[c.ocr] = true;
            matched.push(c);
        }
    }
    matched.sort_by_key(|m| m.gt);
    let unused = |used: &[bool]| used.iter().enumerate().filter(|(_, u)| !**u).map(|(i, _)| i).collect();
    Ok(AlignmentResult { matched, unmatched_gt: unused(&gt_used), unmatched_ocr: unused(&ocr_used) })
}
