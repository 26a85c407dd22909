//! Canonical on-disk JSON form of a [`Page`].
//!
//! ```json
//! {
//!   "version": 1,
//!   "id": "page-001",
//!   "image_dims": [1600, 2400],
//!   "regions": [
//!     { "id": "r0", "type": "commentary", "bbox": [x0, y0, x1, y1],
//!       "lines": [ { "bbox": [...], "words": [ { "text": "λόγος", "bbox": [...], "confidence": 0.93 } ] } ] }
//!   ]
//! }
//! ```
//!
//! Reading enforces the model invariants: ordered bboxes inside the image,
//! containment of words in lines and lines in regions, unique region ids,
//! NFC non-empty word text and region types from the vocabulary.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{BBox, DocError, Page, Region, RegionVocabulary, Result};
use crate::polytonic::is_nfc;

pub const CANONICAL_VERSION: u32 = 1;

#[derive(Serialize)]
struct Out<'a> {
    version: u32,
    id: &'a str,
    image_dims: (u32, u32),
    regions: &'a [Region],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct In {
    version: u32,
    id: String,
    image_dims: (u32, u32),
    regions: Vec<Region>,
}

/// Pretty-printed UTF-8 JSON with a trailing newline.
pub fn write_canonical(page: &Page) -> Vec<u8> {
    let out = Out { version: CANONICAL_VERSION, id: &page.id, image_dims: page.image_dims, regions: &page.regions };
    let mut bytes = serde_json::to_vec_pretty(&out).expect("page serializes");
    bytes.push(b'\n');
    bytes
}

/// Reads a canonical page, validating labels against the default vocabulary.
pub fn read_canonical(bytes: &[u8]) -> Result<Page> {
    read_canonical_with(bytes, &RegionVocabulary::default())
}

pub fn read_canonical_with(bytes: &[u8], vocab: &RegionVocabulary) -> Result<Page> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: In = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        DocError::Schema { path, message: e.into_inner().to_string() }
    })?;
    if doc.version != CANONICAL_VERSION {
        return Err(schema("version", format!("unsupported version {}", doc.version)));
    }
    let page = Page { id: doc.id, image_dims: doc.image_dims, regions: doc.regions };
    validate(&page, vocab)?;
    Ok(page)
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Schema { path: path.into(), message: message.into() }
}

fn validate(page: &Page, vocab: &RegionVocabulary) -> Result<()> {
    if page.id.trim().is_empty() {
        return Err(schema("id", "empty page id"));
    }
    let (w, h) = page.image_dims;
    let inside = |b: &BBox| b.x1() <= w && b.y1() <= h;
    let mut ids = HashSet::new();
    for (ri, region) in page.regions.iter().enumerate() {
        let rp = format!("regions[{ri}]");
        if !ids.insert(region.id.as_str()) {
            return Err(schema(format!("{rp}.id"), format!("duplicate region id {:?}", region.id)));
        }
        vocab.region_type(region.rtype.as_str()).map_err(|e| schema(format!("{rp}.type"), e.to_string()))?;
        if !inside(&region.bbox) {
            return Err(schema(format!("{rp}.bbox"), "bbox outside image"));
        }
        for (li, line) in region.lines.iter().enumerate() {
            let lp = format!("{rp}.lines[{li}]");
            if !region.bbox.contains(&line.bbox) {
                return Err(schema(format!("{lp}.bbox"), "line bbox not inside region bbox"));
            }
            for (wi, word) in line.words.iter().enumerate() {
                let wp = format!("{lp}.words[{wi}]");
                if !line.bbox.contains(&word.bbox) {
                    return Err(schema(format!("{wp}.bbox"), "word bbox not inside line bbox"));
                }
                if word.text.trim().is_empty() {
                    return Err(schema(format!("{wp}.text"), "empty word text"));
                }
                if !is_nfc(&word.text) {
                    return Err(schema(format!("{wp}.text"), "word text is not NFC"));
                }
                if let Some(c) = word.confidence
                    && !(0.0..=1.0).contains(&c)
                {
                    return Err(schema(format!("{wp}.confidence"), "confidence outside [0, 1]"));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{Line, RegionType, Word};

    fn sample() -> Page {
        let words = vec![
            Word { text: "μῆνιν".into(), bbox: BBox::new(10, 10, 60, 30).unwrap(), confidence: Some(0.5) },
            Word::new("ἄειδε", BBox::new(70, 10, 120, 30).unwrap()),
        ];
        let line = Line::from_words(words).unwrap();
        Page {
            id: "p1".into(),
            image_dims: (200, 100),
            regions: vec![Region {
                id: "r0".into(),
                rtype: RegionVocabulary::default().region_type("primary_text").unwrap(),
                bbox: BBox::new(0, 0, 200, 100).unwrap(),
                lines: vec![line],
            }],
        }
    }

    #[test]
    fn round_trip() {
        let page = sample();
        let bytes = write_canonical(&page);
        assert_eq!(read_canonical(&bytes).unwrap(), page);
        let again = write_canonical(&read_canonical(&bytes).unwrap());
        assert_eq!(again, bytes);
    }

    #[test]
    fn empty_page_is_valid() {
        let page = Page::empty("blank", (10, 10));
        assert_eq!(read_canonical(&write_canonical(&page)).unwrap(), page);
    }

    #[test]
    fn inverted_bbox_is_schema_error_with_path() {
        let text = String::from_utf8(write_canonical(&sample())).unwrap();
        let bad = text.replacen(
            "[\n                10,\n                10,\n                60,",
            "[\n                70,\n                10,\n                60,",
            1,
        );
        assert_ne!(bad, text);
        let e = read_canonical(bad.as_bytes()).unwrap_err();
        match e {
            DocError::Schema { path, message } => {
                assert_eq!(path, "regions[0].lines[0].words[0].bbox");
                assert!(message.contains("inverted"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_violations() {
        let mut p = sample();
        p.regions[0].lines[0].words[0].text = "\u{03B1}\u{0301}".into();
        let e = read_canonical(&write_canonical(&p)).unwrap_err();
        assert!(e.to_string().contains("regions[0].lines[0].words[0].text"), "{e}");

        let mut p = sample();
        p.regions[0].rtype = RegionType::new_unchecked("commentry");
        assert!(read_canonical(&write_canonical(&p)).is_err());

        let mut p = sample();
        p.regions.push(p.regions[0].clone());
        let e = read_canonical(&write_canonical(&p)).unwrap_err();
        assert!(e.to_string().contains("duplicate region id"));

        let mut p = sample();
        p.image_dims = (100, 100);
        assert!(read_canonical(&write_canonical(&p)).is_err());

        assert!(read_canonical(br#"{"version":2,"id":"x","image_dims":[1,1],"regions":[]}"#).is_err());
        assert!(read_canonical(br#"{"version":1,"id":"x","image_dims":[1,1],"regions":[],"extra":1}"#).is_err());
    }
}
