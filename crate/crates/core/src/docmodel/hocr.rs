//! hOCR reader.
//!
//! Understands `ocr_page` (page size from its bbox), `ocr_carea` (one region
//! each), the line classes and `ocrx_word`. Markup must be well formed apart
//! from the usual HTML void elements (`<meta>`, `<br>`, ...), which need no
//! closing tag.

use quick_xml::escape::resolve_html5_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use super::{BBox, DocError, Line, Page, Region, RegionType, Result, Word};
use crate::polytonic::normalize_nfc;

const LINE_CLASSES: &[&str] = &["ocr_line", "ocrx_line", "ocr_header", "ocr_caption", "ocr_textfloat"];
const VOID_ELEMENTS: &[&str] =
    &["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"];

/// A parsed page plus the number of word elements that were dropped because
/// they had no bbox or no text.
#[derive(Debug, Clone, PartialEq)]
pub struct HocrParse {
    pub page: Page,
    pub dropped_words: usize,
}

#[derive(Debug)]
struct Open {
    name: String,
    class: Option<String>,
}

#[derive(Default)]
struct Title {
    bbox: Option<[u32; 4]>,
    wconf: Option<f64>,
}

fn parse_title(title: &str) -> Title {
    let mut t = Title::default();
    for prop in title.split(';') {
        let mut parts = prop.split_whitespace();
        match parts.next() {
            Some("bbox") => {
                let nums: Vec<u32> = parts.filter_map(|p| p.parse().ok()).collect();
                if let [x0, y0, x1, y1] = nums[..] {
                    t.bbox = Some([x0, y0, x1, y1]);
                }
            }
            Some("x_wconf") => {
                t.wconf = parts.next().and_then(|v| v.parse::<f64>().ok()).map(|c| (c / 100.0).clamp(0.0, 1.0));
            }
            _ => {}
        }
    }
    t
}

struct Builder {
    dims: Option<(u32, u32)>,
    page_id: Option<String>,
    careas: Vec<Vec<Line>>,
    loose: Vec<Line>,
    carea_depth: Option<usize>,
    line: Option<(usize, Option<[u32; 4]>, Vec<Word>)>,
    word: Option<OpenWord>,
    dropped: usize,
}

/// Depth, bbox, confidence and text of the word being read.
type OpenWord = (usize, Option<[u32; 4]>, Option<f64>, String);

impl Builder {
    fn clamp(&self, [x0, y0, x1, y1]: [u32; 4]) -> Option<BBox> {
        let (w, h) = self.dims.unwrap_or((u32::MAX, u32::MAX));
        let (x1, y1) = (x1.min(w), y1.min(h));
        BBox::new(x0.min(x1), y0.min(y1), x1, y1).ok().filter(|_| x0 <= x1 && y0 <= y1)
    }

    fn push_line(&mut self, line: Line) {
        match self.carea_depth {
            Some(_) => self.careas.last_mut().expect("open carea").push(line),
            None => self.loose.push(line),
        }
    }

    fn finish_word(&mut self) {
        let Some((_, bbox, conf, text)) = self.word.take() else {
            return;
        };
        let text = normalize_nfc(text.trim());
        let bbox = bbox.and_then(|b| self.clamp(b));
        match bbox {
            Some(bbox) if !text.is_empty() => {
                let word = Word { text, bbox, confidence: conf };
                match &mut self.line {
                    Some((_, _, words)) => words.push(word),
                    None => self.push_line(Line { bbox, words: vec![word] }),
                }
            }
            _ => self.dropped += 1,
        }
    }

    fn finish_line(&mut self) {
        let Some((_, bbox, words)) = self.line.take() else {
            return;
        };
        let Some(word_union) = BBox::enclosing(words.iter().map(|w| &w.bbox)) else {
            return;
        };
        let bbox = bbox.and_then(|b| self.clamp(b)).map_or(word_union, |b| b.union(&word_union));
        self.push_line(Line { bbox, words });
    }

    fn start(&mut self, e: &BytesStart, depth: usize, path: &str) -> Result<()> {
        let mut class = None;
        let mut title = None;
        let mut id = None;
        for attr in e.html_attributes() {
            let attr = attr.map_err(|err| markup(path, err.to_string()))?;
            let value = attr
                .normalized_value_with(XmlVersion::Implicit1_0, 16, resolve_html5_entity)
                .map_err(|err| markup(path, err.to_string()))?
                .into_owned();
            match attr.key.as_ref() {
                "class" => class = Some(value),
                "title" => title = Some(value),
                "id" => id = Some(value),
                _ => {}
            }
        }
        let Some(class) = class else { return Ok(()) };
        let has = |c: &str| class.split_whitespace().any(|k| k == c);
        let title = parse_title(title.as_deref().unwrap_or(""));

        if has("ocr_page") {
            if self.dims.is_none() {
                let [_, _, x1, y1] = title.bbox.ok_or(DocError::MissingPageDims)?;
                self.dims = Some((x1, y1));
                self.page_id = id;
            }
        } else if has("ocr_carea") {
            if self.carea_depth.is_none() {
                self.carea_depth = Some(depth);
                self.careas.push(Vec::new());
            }
        } else if LINE_CLASSES.iter().any(|c| has(c)) {
            self.finish_line();
            self.line = Some((depth, title.bbox, Vec::new()));
        } else if has("ocrx_word") || has("ocr_word") {
            self.finish_word();
            self.word = Some((depth, title.bbox, title.wconf, String::new()));
        }
        Ok(())
    }

    fn end(&mut self, depth: usize) {
        if self.word.as_ref().is_some_and(|w| w.0 == depth) {
            self.finish_word();
        }
        if self.line.as_ref().is_some_and(|l| l.0 == depth) {
            self.finish_line();
        }
        if self.carea_depth == Some(depth) {
            self.carea_depth = None;
        }
    }

    fn text(&mut self, s: &str) {
        if let Some((_, _, _, text)) = &mut self.word {
            text.push_str(s);
        }
    }
}

fn markup(path: &str, message: impl Into<String>) -> DocError {
    DocError::Markup { path: if path.is_empty() { "/".into() } else { path.to_owned() }, message: message.into() }
}

fn path_of(stack: &[Open]) -> String {
    stack
        .iter()
        .map(|o| match &o.class {
            Some(c) => format!("{}.{}", o.name, c.split_whitespace().next().unwrap_or("")),
            None => o.name.clone(),
        })
        .collect::<Vec<_>>()
        .join("/")
}

/// Parses an hOCR document into a [`Page`]. Regions carry the `unassigned`
/// type until [`super::assign_regions`] attaches annotations.
pub fn parse_hocr(bytes: &[u8]) -> Result<HocrParse> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| markup("", format!("invalid UTF-8 at byte {}", e.valid_up_to())))?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = false;

    let mut stack: Vec<Open> = Vec::new();
    let mut b = Builder {
        dims: None,
        page_id: None,
        careas: Vec::new(),
        loose: Vec::new(),
        carea_depth: None,
        line: None,
        word: None,
        dropped: 0,
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| markup(&path_of(&stack), format!("{e} (byte {})", reader.error_position())))?;
        match event {
            Event::Start(e) => {
                let name = e.local_name().as_ref().to_ascii_lowercase();
                let class = e
                    .html_attributes()
                    .flatten()
                    .find(|a| a.key.as_ref() == "class")
                    .map(|a| a.value.clone().into_owned());
                let is_void = VOID_ELEMENTS.contains(&name.as_str());
                stack.push(Open { name, class });
                let path = path_of(&stack);
                b.start(&e, stack.len(), &path)?;
                if is_void {
                    b.end(stack.len());
                    stack.pop();
                }
            }
            Event::Empty(e) => {
                let name = e.local_name().as_ref().to_ascii_lowercase();
                stack.push(Open { name, class: None });
                let path = path_of(&stack);
                b.start(&e, stack.len(), &path)?;
                b.end(stack.len());
                stack.pop();
            }
            Event::End(e) => {
                let name = e.local_name().as_ref().to_ascii_lowercase();
                if VOID_ELEMENTS.contains(&name.as_str()) {
                    continue;
                }
                match stack.last() {
                    Some(open) if open.name == name => {
                        b.end(stack.len());
                        stack.pop();
                    }
                    Some(open) => {
                        return Err(markup(
                            &path_of(&stack),
                            format!("closing </{name}> does not match open <{}>", open.name),
                        ));
                    }
                    None => {
                        return Err(markup("", format!("closing </{name}> without an open element")));
                    }
                }
            }
            Event::Text(t) => b.text(&t.html_content()),
            Event::CData(t) => b.text(&t.html_content()),
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    Ok(None) => {
                        let name = r.html_content().into_owned();
                        resolve_html5_entity(&name)
                            .ok_or_else(|| markup(&path_of(&stack), format!("unknown entity &{name};")))?
                            .to_owned()
                    }
                    Err(e) => return Err(markup(&path_of(&stack), e.to_string())),
                };
                b.text(&resolved);
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(markup(&path_of(&stack), "unclosed element at end of document"));
    }

    let dims = b.dims.ok_or(DocError::MissingPageDims)?;
    let mut groups: Vec<Vec<Line>> = std::mem::take(&mut b.careas);
    groups.push(std::mem::take(&mut b.loose));
    let regions = groups
        .into_iter()
        .filter(|lines| !lines.is_empty())
        .enumerate()
        .map(|(i, lines)| Region {
            id: format!("r{i}"),
            rtype: RegionType::unassigned(),
            bbox: BBox::enclosing(lines.iter().map(|l| &l.bbox)).expect("non-empty"),
            lines,
        })
        .collect();

    Ok(HocrParse {
        page: Page { id: b.page_id.unwrap_or_else(|| "page".to_owned()), image_dims: dims, regions },
        dropped_words: b.dropped,
    })
}
