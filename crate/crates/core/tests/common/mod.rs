#![allow(dead_code)]

use commentary_ocr::docmodel::{BBox, Line, Page, Region, RegionType, RegionVocabulary, Word};
use rand::Rng;
use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

/// Precomposed polytonic letters, plain Greek, Latin, digits and
/// punctuation, all NFC.
pub const ALPHABET: &[char] = &[
    'α', 'β', 'γ', 'δ', 'ε', 'ζ', 'η', 'θ', 'ι', 'κ', 'λ', 'μ', 'ν', 'ξ', 'ο', 'π', 'ρ', 'σ', 'ς', 'τ', 'υ', 'φ', 'χ',
    'ψ', 'ω', 'ά', 'έ', 'ή', 'ί', 'ό', 'ύ', 'ώ', 'ἀ', 'ἁ', 'ἄ', 'ἅ', 'ἂ', 'ἆ', 'ἐ', 'ἑ', 'ἔ', 'ὀ', 'ὁ', 'ὄ', 'ῆ', 'ῶ',
    'ᾳ', 'ῃ', 'ῳ', 'ᾄ', 'ὰ', 'ὲ', 'ὴ', 'ὶ', 'ὸ', 'ὺ', 'ὼ', 'ϊ', 'ΐ', 'Α', 'Ἀ', 'Ὁ', 'a', 'b', 'e', 'm', 'n', 'r', 's',
    'x', '0', '1', '5', '.', ',', '·', ';', '(', ')',
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word(r: &mut impl Rng, max_len: usize) -> String {
    let n = r.gen_range(1..=max_len);
    (0..n).map(|_| *ALPHABET.choose(r).unwrap()).collect()
}

/// A page of 1 to 4 typed regions stacked vertically, each with up to 4
/// lines of non-overlapping words. Some regions are unassigned.
pub fn random_page(seed: u64, id: &str) -> Page {
    let mut r = rng(seed);
    let vocab = RegionVocabulary::default();
    let labels: Vec<&str> = vocab.labels().map(|(l, _)| l).collect();
    let mut page = Page::empty(id, (2000, 2000));
    for ri in 0..r.gen_range(1..=4u32) {
        let top = ri * 480;
        let rtype = if r.gen_bool(0.15) {
            RegionType::unassigned()
        } else {
            vocab.region_type(labels.choose(&mut r).unwrap()).unwrap()
        };
        let mut lines = Vec::new();
        for li in 0..r.gen_range(1..=4u32) {
            let y0 = top + 20 + li * 100;
            let mut x = 60;
            let mut words = Vec::new();
            for _ in 0..r.gen_range(1..=6) {
                let w = r.gen_range(40..=220);
                words.push(Word::new(random_word(&mut r, 8), BBox::new(x, y0, x + w, y0 + 40).unwrap()));
                x += w + r.gen_range(30..=80);
            }
            lines.push(Line::from_words(words).unwrap());
        }
        page.regions.push(Region {
            id: format!("r{ri}"),
            rtype,
            bbox: BBox::new(20, top, 1980, top + 460).unwrap(),
            lines,
        });
    }
    page
}

/// Copies `page` with word texts changed by `f`.
pub fn map_words(page: &Page, mut f: impl FnMut(&Word) -> String) -> Page {
    let mut out = page.clone();
    for region in &mut out.regions {
        for line in &mut region.lines {
            for w in &mut line.words {
                w.text = f(w);
            }
        }
    }
    out
}
