//! Coordinate-based GT/OCR word alignment and error metrics grouped by
//! layout region.

mod align;
mod metrics;
mod report;

pub use align::{AlignmentResult, DEFAULT_IOU_THRESHOLD, MatchedPair, align_words};
pub use metrics::{
    CharStats, CorpusStats, PageEvaluation, Scope, ScopeTallies, Tally, corpus_stats, evaluate_page, region_cer, wer,
};
pub use report::{
    CER_DENOMINATOR_NOTE, CHAR_UNIT_NOTE, CommentaryResult, CommentaryRow, MetricsReport, PipelineReport,
    PipelineResult, ReportMetadata, STD_NOTE, ScopeRow,
};

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("page {page}: image dims differ (gt {gt:?}, ocr {ocr:?})")]
    DimsMismatch { page: String, gt: (u32, u32), ocr: (u32, u32) },
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("negative or non-finite weight {0}")]
    BadWeight(f64),
    #[error("IoU threshold {0} outside (0, 1]")]
    BadThreshold(f64),
}

/// Unit-cost edit distance over codepoints.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

/// Edit distance over any comparable sequence, with two rows of O(min) length.
pub fn levenshtein_chars<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    // strip a shared prefix and suffix: they never cost anything
    let pre = long.iter().zip(short).take_while(|(x, y)| x == y).count();
    let (long, short) = (&long[pre..], &short[pre..]);
    let suf = long.iter().rev().zip(short.iter().rev()).take_while(|(x, y)| x == y).count();
    let (long, short) = (&long[..long.len() - suf], &short[..short.len() - suf]);
    if short.is_empty() {
        return long.len();
    }

    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0; short.len() + 1];
    for (i, x) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Multiset precision, recall and F1 between two token lists. Two empty
/// lists agree perfectly.
pub fn bag_of_words_f1<S: AsRef<str> + Eq + Hash>(gt: &[S], ocr: &[S]) -> Prf {
    let mut counts: HashMap<&str, (u64, u64)> = HashMap::new();
    for t in gt {
        counts.entry(t.as_ref()).or_default().0 += 1;
    }
    for t in ocr {
        counts.entry(t.as_ref()).or_default().1 += 1;
    }
    let matched = counts.values().map(|(g, o)| g.min(o)).sum();
    prf(matched, gt.len() as u64, ocr.len() as u64)
}

pub(crate) fn prf(matched: u64, gt: u64, ocr: u64) -> Prf {
    if gt == 0 && ocr == 0 {
        return Prf { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let precision = ratio(matched, ocr);
    let recall = ratio(matched, gt);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Prf { precision, recall, f1 }
}

pub fn nld_from_cer(cer: f64) -> f64 {
    1.0 - cer
}

/// Weighted mean and weighted population standard deviation.
pub fn aggregate_weighted(values: &[(f64, f64)]) -> Result<(f64, f64), EvalError> {
    if let Some(&(_, w)) = values.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
        return Err(EvalError::BadWeight(w));
    }
    let total: f64 = values.iter().map(|(_, w)| w).sum();
    if total == 0.0 {
        return Err(EvalError::ZeroWeights);
    }
    let mean = values.iter().map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values.iter().map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total;
    Ok((mean, var.sqrt()))
}
