//! Rectangle region annotations in VGG Image Annotator (VIA) JSON.
//!
//! Accepted layouts: a full VIA project (`_via_img_metadata`), a map of image
//! entries, or a single image entry. Each entry carries `regions`, either as
//! an array or as an index-keyed object (VIA 1). Every region needs
//! `shape_attributes` of shape `rect` and a label in `region_attributes`.

use serde_json::{Map, Value};

use super::{BBox, DocError, RegionType, RegionVocabulary, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionAnnotation {
    pub rtype: RegionType,
    pub bbox: BBox,
}

fn err(path: &str, message: impl Into<String>) -> DocError {
    DocError::Annotation { path: path.to_owned(), message: message.into() }
}

/// Parses every rectangle in the file, in document order. Overlapping
/// rectangles are all returned; containment is resolved by
/// [`super::assign_regions`].
pub fn parse_region_annotations(bytes: &[u8], vocab: &RegionVocabulary) -> Result<Vec<RegionAnnotation>> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| err("$", e.to_string()))?;
    let mut out = Vec::new();
    let obj = root.as_object().ok_or_else(|| err("$", "expected a JSON object"))?;

    if let Some(meta) = obj.get("_via_img_metadata") {
        let entries = meta.as_object().ok_or_else(|| err("$._via_img_metadata", "expected an object"))?;
        for (key, entry) in entries {
            parse_entry(entry, &format!("$._via_img_metadata.{key}"), vocab, &mut out)?;
        }
    } else if obj.contains_key("regions") {
        parse_entry(&root, "$", vocab, &mut out)?;
    } else {
        for (key, entry) in obj {
            parse_entry(entry, &format!("$.{key}"), vocab, &mut out)?;
        }
    }
    Ok(out)
}

fn parse_entry(entry: &Value, path: &str, vocab: &RegionVocabulary, out: &mut Vec<RegionAnnotation>) -> Result<()> {
    let entry = entry.as_object().ok_or_else(|| err(path, "expected an image entry object"))?;
    let Some(regions) = entry.get("regions") else {
        return Err(err(path, "missing \"regions\""));
    };
    match regions {
        Value::Array(items) => {
            for (i, r) in items.iter().enumerate() {
                out.push(parse_region(r, &format!("{path}.regions[{i}]"), vocab)?);
            }
        }
        Value::Object(items) => {
            for (k, r) in items {
                out.push(parse_region(r, &format!("{path}.regions.{k}"), vocab)?);
            }
        }
        _ => {
            return Err(err(&format!("{path}.regions"), "expected an array or object"));
        }
    }
    Ok(())
}

fn parse_region(region: &Value, path: &str, vocab: &RegionVocabulary) -> Result<RegionAnnotation> {
    let region = region.as_object().ok_or_else(|| err(path, "expected a region object"))?;
    let shape_path = format!("{path}.shape_attributes");
    let shape = region
        .get("shape_attributes")
        .and_then(Value::as_object)
        .ok_or_else(|| err(&shape_path, "missing shape_attributes object"))?;
    match shape.get("name").and_then(Value::as_str) {
        Some("rect") => {}
        Some(other) => {
            return Err(err(&format!("{shape_path}.name"), format!("non-rectangle shape {other:?}")));
        }
        None => return Err(err(&format!("{shape_path}.name"), "missing shape name")),
    }
    let num = |key: &str| -> Result<f64> {
        shape
            .get(key)
            .and_then(Value::as_f64)
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(&format!("{shape_path}.{key}"), "expected a number"))
    };
    let (x, y, w, h) = (num("x")?, num("y")?, num("width")?, num("height")?);
    if w < 0.0 || h < 0.0 {
        return Err(err(&shape_path, "negative width or height"));
    }
    let px = |v: f64| v.round().clamp(0.0, f64::from(u32::MAX)) as u32;
    let bbox = BBox::new(px(x), px(y), px(x + w), px(y + h)).map_err(|e| err(&shape_path, e.to_string()))?;

    let attrs_path = format!("{path}.region_attributes");
    let attrs = region
        .get("region_attributes")
        .and_then(Value::as_object)
        .ok_or_else(|| err(&attrs_path, "missing region_attributes object"))?;
    let label = find_label(attrs, vocab)
        .ok_or_else(|| err(&attrs_path, format!("no region label under any of {:?}", vocab.label_attributes())))?;
    let rtype = vocab.region_type(label.trim())?;
    Ok(RegionAnnotation { rtype, bbox })
}

/// A label is either a plain string or a VIA checkbox object with exactly
/// one `true` entry.
fn find_label<'a>(attrs: &'a Map<String, Value>, vocab: &RegionVocabulary) -> Option<&'a str> {
    vocab.label_attributes().iter().find_map(|key| match attrs.get(key)? {
        Value::String(s) if !s.trim().is_empty() => Some(s.as_str()),
        Value::Object(flags) => {
            let mut on = flags.iter().filter(|(_, v)| v.as_bool() == Some(true));
            match (on.next(), on.next()) {
                (Some((k, _)), None) => Some(k.as_str()),
                _ => None,
            }
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<Vec<RegionAnnotation>> {
        parse_region_annotations(json.as_bytes(), &RegionVocabulary::default())
    }

    #[test]
    fn single_rect() {
        let got = parse(
            r#"{"filename":"p1.png","regions":[{"shape_attributes":{"name":"rect","x":10,"y":20,"width":100,"height":50},"region_attributes":{"type":"commentary"}}]}"#,
        )
        .unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].rtype.as_str(), "commentary");
        assert_eq!(got[0].bbox, BBox::new(10, 20, 110, 70).unwrap());
    }

    #[test]
    fn misspelled_label() {
        let e = parse(
            r#"{"regions":[{"shape_attributes":{"name":"rect","x":0,"y":0,"width":1,"height":1},"region_attributes":{"type":"commentry"}}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("unknown region type"), "{e}");
        assert!(e.to_string().contains("commentry"));
    }

    #[test]
    fn polygon_rejected_with_path() {
        let e = parse(
            r#"{"regions":[{"shape_attributes":{"name":"polygon","all_points_x":[0,1],"all_points_y":[0,1]},"region_attributes":{"type":"commentary"}}]}"#,
        )
        .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("non-rectangle"), "{msg}");
        assert!(msg.contains("$.regions[0].shape_attributes.name"), "{msg}");
    }

    #[test]
    fn overlapping_rects_both_returned() {
        let got = parse(
            r#"{"regions":[
                {"shape_attributes":{"name":"rect","x":0,"y":0,"width":100,"height":100},"region_attributes":{"type":"commentary"}},
                {"shape_attributes":{"name":"rect","x":50,"y":50,"width":100,"height":100},"region_attributes":{"type":"footnote"}}]}"#,
        )
        .unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn via_project_and_checkbox_labels() {
        let got = parse(
            r#"{"_via_settings":{},"_via_img_metadata":{"p1.png123":{"filename":"p1.png","size":123,
                "regions":[{"shape_attributes":{"name":"rect","x":1.4,"y":2.6,"width":10,"height":10},
                "region_attributes":{"text":{"app_crit":true,"footnote":false}}}]}}}"#,
        )
        .unwrap();
        assert_eq!(got[0].rtype.as_str(), "app_crit");
        assert_eq!(got[0].bbox, BBox::new(1, 3, 11, 13).unwrap());
    }

    #[test]
    fn missing_label() {
        let e = parse(r#"{"regions":[{"shape_attributes":{"name":"rect","x":0,"y":0,"width":1,"height":1},"region_attributes":{}}]}"#)
            .unwrap_err();
        assert!(matches!(e, DocError::Annotation { .. }));
    }
}
