//! Page discovery and loading. A page file is `<id>.html`, `<id>.hocr`,
//! `<id>.xml` (hOCR) or `<id>.json` (canonical); its region annotations,
//! if any, are `<id>.json` in the annotation directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use commentary_ocr::docmodel::{
    Page, RegionVocabulary, assign_regions, parse_hocr, parse_region_annotations, read_canonical_with,
};

use crate::CliError;
use crate::manifest::Commentary;

const HOCR_EXTENSIONS: [&str; 3] = ["html", "hocr", "xml"];

/// Page files of a directory keyed by page id.
pub fn list_pages(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    let mut pages = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|source| CliError::Io { path: dir.to_owned(), source })?.path();
        let Some(ext) = path.extension().and_then(|e| e.to_str()) else {
            continue;
        };
        if !(ext == "json" || HOCR_EXTENSIONS.contains(&ext)) || !path.is_file() {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
            continue;
        };
        if let Some(prev) = pages.insert(id.clone(), path.clone()) {
            return Err(CliError::PageSet {
                path: dir.to_owned(),
                message: format!("page {id:?} has two files: {} and {}", prev.display(), path.display()),
            });
        }
    }
    Ok(pages)
}

/// Loads a page file. The page id is taken from the file name so that GT
/// and OCR pages pair up by name.
pub fn load_page(path: &Path, vocab: &RegionVocabulary) -> Result<Page, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let doc = |source| CliError::Document { path: path.to_owned(), source };
    let mut page = if path.extension().is_some_and(|e| e == "json") {
        read_canonical_with(&bytes, vocab).map_err(doc)?
    } else {
        let parsed = parse_hocr(&bytes).map_err(doc)?;
        if parsed.dropped_words > 0 {
            log::warn!("{}: dropped {} words without bbox or text", path.display(), parsed.dropped_words);
        }
        parsed.page
    };
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        page.id = stem.to_owned();
    }
    Ok(page)
}

/// Loads a GT page and types its regions from the annotation file.
pub fn load_gt_page(path: &Path, annotations: Option<&Path>, vocab: &RegionVocabulary) -> Result<Page, CliError> {
    let page = load_page(path, vocab)?;
    let Some(ann_path) = annotations else {
        return Ok(page);
    };
    let bytes = std::fs::read(ann_path).map_err(|source| CliError::Io { path: ann_path.to_owned(), source })?;
    let annots = parse_region_annotations(&bytes, vocab)
        .map_err(|source| CliError::Document { path: ann_path.to_owned(), source })?;
    Ok(assign_regions(&page, &annots))
}

/// GT page paths of a commentary with their annotation files. Fails with
/// the list of pages lacking annotations.
pub fn gt_files(c: &Commentary) -> Result<Vec<(String, PathBuf, Option<PathBuf>)>, CliError> {
    let pages = list_pages(&c.gt)?;
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for (id, path) in pages {
        let ann = match &c.annotations {
            Some(dir) => {
                let p = dir.join(format!("{id}.json"));
                if !p.is_file() {
                    missing.push(id.clone());
                }
                Some(p)
            }
            None => None,
        };
        out.push((id, path, ann));
    }
    if !missing.is_empty() {
        return Err(CliError::PageSet {
            path: c.annotations.clone().unwrap_or_default(),
            message: format!("commentary {}: no region annotations for pages {}", c.id, missing.join(", ")),
        });
    }
    if out.is_empty() {
        return Err(CliError::PageSet { path: c.gt.clone(), message: format!("commentary {}: no GT pages", c.id) });
    }
    Ok(out)
}

/// Pairs GT and OCR pages by id. Fails listing OCR pages without GT and
/// GT pages without OCR.
pub fn pair_pages(
    commentary: &str,
    gt: &BTreeMap<String, PathBuf>,
    ocr: &BTreeMap<String, PathBuf>,
) -> Result<Vec<String>, CliError> {
    let orphans: Vec<&str> = ocr.keys().filter(|k| !gt.contains_key(*k)).map(String::as_str).collect();
    let missing: Vec<&str> = gt.keys().filter(|k| !ocr.contains_key(*k)).map(String::as_str).collect();
    if orphans.is_empty() && missing.is_empty() {
        return Ok(gt.keys().cloned().collect());
    }
    let mut parts = Vec::new();
    if !orphans.is_empty() {
        parts.push(format!("OCR pages without GT: {}", orphans.join(", ")));
    }
    if !missing.is_empty() {
        parts.push(format!("GT pages without OCR: {}", missing.join(", ")));
    }
    Err(CliError::PageMismatch { commentary: commentary.to_owned(), message: parts.join("; ") })
}
