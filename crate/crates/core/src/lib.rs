//! Post-processing and evaluation of OCR output for historical classical
//! commentaries: polytonic Greek normalization, a page/region/line/word
//! document model, lexicon-driven correction and coordinate-based
//! CER/WER/F1 evaluation grouped by layout region.

pub mod docmodel;
pub mod evaluate;
pub mod lexicon;
pub mod polytonic;
pub mod postprocess;
