#!/usr/bin/env python3
"""Builds the demo corpus: hOCR GT and OCR pages, VIA region files, a Greek
wordlist, a run manifest, and the expected-value files under golden/.

Every page is laid out from a token table. A token says what GT holds at a
slot, what the OCR engine produced there, and what post-processing should
turn it into. The expected files are derived from these declarations and
from a separate edit-distance routine, not from the Rust implementation.

Run from anywhere: python3 demo/generate.py
"""

import json
import os
import unicodedata
from html import escape

HERE = os.path.dirname(os.path.abspath(__file__))
PAGE_W, PAGE_H = 2000, 2800
CHAR_W, WORD_H, GAP, LINE_STEP = 22, 40, 40, 80


def nfc(s):
    return unicodedata.normalize("NFC", s)


# Token kinds ------------------------------------------------------------

class Tok:
    """gt: GT text or None; ocr: OCR text or None; post: text after
    post-processing (defaults to ocr)."""

    def __init__(self, gt, ocr, post=None, rule=None):
        self.gt = None if gt is None else nfc(gt)
        self.ocr = None if ocr is None else nfc(ocr)
        self.post = self.ocr if post is None else nfc(post)
        self.rule = rule


class Hyph:
    """GT word at this slot; OCR has `head` here and `tail` as the first
    non-numeric word of the next line."""

    def __init__(self, gt, head, tail):
        self.gt, self.head, self.tail = nfc(gt), nfc(head), nfc(tail)
        assert nfc(head[:-1] + tail) == self.gt


def same(w):
    return Tok(w, w)


def err(gt, ocr, post=None, rule=None):
    return Tok(gt, ocr, post, rule)


def ins(ocr):
    return Tok(None, ocr)


def drop(gt):
    return Tok(gt, None)


def line(*items):
    out = []
    for it in items:
        if isinstance(it, str):
            out.extend(same(w) for w in it.split())
        else:
            out.append(it)
    return out


# Corpus -------------------------------------------------------------------

PAGES = [
    {
        "commentary": "jebb_demo",
        "id": "p0001",
        "blocks": [
            ("page_number", (1800, 100), [line("12")]),
            ("title", (700, 100), [line("THE", err("ILIAD", "ILIAU"), "BOOK I")]),
            ("primary_text", (200, 300), [
                line("μῆνιν", err("ἄειδε", "άειδε"), "θεὰ Πηληϊάδεω Ἀχιλῆος"),
                line(err("οὐλομένην,", "ουλομένην,", "οὐλομένην,", "unique-accent"),
                     "ἣ μυρί᾽ Ἀχαιοῖς ἄλγε᾽", err("ἔθηκε,", "ἔθηκε.")),
                line("πολλὰς δ᾽ ἰφθίμους ψυχὰς Ἄϊδι",
                     err("προΐαψεν", "προΐαψευ", "προΐαψεν", "confusion-pair")),
                line("ἡρώων, αὐτοὺς δὲ ἑλώρια τεῦχε", Hyph("κύνεσσιν", "κύνεσ-", "σιν")),
                line("5", "οἰωνοῖσί τε πᾶσι·"),
            ]),
            ("app_crit", (200, 780), [
                line("1", "μῆνιν]", "μῆνις", err("Zen.", "Zeu."),
                     "4", "κύνεσσιν]", "κύνεσι", "A"),
            ]),
            ("commentary", (200, 920), [
                line("1.", "μῆνιν,", err("the", "tbe"), "wrath of Achilles, is the theme of the whole"),
                line("poem; cp. the first word of the", Hyph("Odyssey,", "Odys-", "sey,")),
                line("ἄνδρα. The", err("λόγος", "λόγσς", "λόγος", "confusion-pair"),
                     "of the poet concerns", err("ἀνθρώπων", "ανθρώπων", "ἀνθρώπων", "unique-accent"),
                     ins(",")),
                line("and gods alike."),
            ]),
            ("footnote", (200, 1300), [line("¹ See Leaf ad", drop("loc."))]),
        ],
        "noise": [("·", (1500, 2600, 1530, 2640))],
    },
    {
        "commentary": "jebb_demo",
        "id": "p0002",
        "blocks": [
            ("page_number", (200, 100), [line("13")]),
            ("introduction", (200, 250), [
                line("The poem opens with an invocation of the", err("Muse,", "Musc,")),
                line("who is asked to sing of the", Hyph("quarrel", "quar-", "rel")),
                line("between Agamemnon and Achilles."),
            ]),
            ("commentary", (200, 600), [
                line("2.", "οὐλομένην:", "cp. the use of", "ὀλέσθαι", "in curses;"),
                line("the", err("ἔχων", "ἔχωυ", "ἔχων", "confusion-pair"), "of v. 3 is",
                     err("ἄνθρωπος", "άνθρωπος", "ἄνθρωπος", "unique-accent")),
            ]),
            ("bibliography", (200, 900), [
                line("Leaf, W., The Iliad, London", err("1900.", "1906.")),
                line("Monro, D. B., Homeric Grammar, Oxford 1891."),
            ]),
            (None, (200, 2500), [line("ΙΛΙΑΔΟΣ")]),
        ],
        "noise": [],
    },
    {
        "commentary": "wecklein_demo",
        "id": "p0001",
        "blocks": [
            ("page_number", (1800, 100), [line("5")]),
            ("primary_text", (200, 250), [
                line("Ἀεὶ μέν, ὦ παῖ Λαρτίου, δέδορκά σε"),
                line("πεῖράν τιν᾽", err("ἐχθρῶν", "ἐχθρῶυ", "ἐχθρῶν", "confusion-pair"),
                     "ἁρπάσαι", err("θηρώμενον·", "θηρὼμενον·", "θηρώμενον·", "unique-accent")),
                line("καὶ νῦν ἐπὶ σκηναῖς σε",
                     err("ναυτικαῖς", "ναντικαῖς", "ναυτικαῖς", "confusion-pair"), "ὁρῶ"),
            ]),
            ("line_number", (1700, 410), [line("3")]),
            ("app_crit", (200, 560), [line("2", "ἁρπάσαι]", "ἀρπάσαι", "L")]),
            ("commentary", (200, 700), [
                line("1.", err("Die", "Dic"), "Worte", "λόγος", "und", err("δέδορκα", "δέδορκα"),
                     "bezeichnen das", Hyph("Schauen", "Schau-", "en")),
                line("der Göttin, vgl. v. 3", err("ὁρῶ.", "ὀρῶ.", "ὁρῶ.", "confusion-pair")),
            ]),
            ("index", (200, 1000), [line("Aias 1, 3, Athena 2.")]),
        ],
        "noise": [("'", (1850, 2650, 1870, 2690))],
    },
]

# Words added to the lexicon beside the Greek words of the GT. Some share a
# de-accented skeleton so that the unique-accent index must leave them out.
EXTRA_LEXICON = [
    "καί", "ὁ", "ἡ", "τό", "ἤ", "ἥ", "ἦ", "ἀλλά", "ἄλλα", "λόγου", "θεός", "θεά", "ἔχω",
    "ἀείδω", "ψυχή", "μυρίος", "ἄνδρες", "φίλος", "φίλε", "παιδός", "ὅτι", "ὅ,τι",
]


# Layout -------------------------------------------------------------------

def width(*texts):
    n = max(len(t) for t in texts if t)
    return CHAR_W * n + 8


def layout(page):
    """Slots per block line: list of dicts with gt, ocr, post, bbox."""
    blocks = []
    for label, (bx, by), lines in page["blocks"]:
        carry = None  # tail fragment pushed to the next line
        out_lines = []
        for li, toks in enumerate(lines):
            y0 = by + li * LINE_STEP
            x = bx
            slots = []
            pending = carry
            carry = None
            for ti, tok in enumerate(toks):
                marginal = tok_text(tok).rstrip(".").isdigit() and ti == 0 if isinstance(tok, Tok) else False
                if pending is not None and not marginal:
                    w = width(pending)
                    slots.append({"gt": None, "ocr": pending, "post": None, "bbox": (x, y0, x + w, y0 + WORD_H),
                                  "tail": True})
                    x += w + GAP
                    pending = None
                if isinstance(tok, Hyph):
                    w = width(tok.gt, tok.head)
                    slots.append({"gt": tok.gt, "ocr": tok.head, "post": tok.gt, "bbox": (x, y0, x + w, y0 + WORD_H),
                                  "hyph": tok})
                    carry = tok.tail
                else:
                    w = width(tok.gt, tok.ocr)
                    slots.append({"gt": tok.gt, "ocr": tok.ocr, "post": tok.post, "bbox": (x, y0, x + w, y0 + WORD_H),
                                  "rule": tok.rule})
                x += w + GAP
            assert pending is None, "hyphen tail needs a following word"
            out_lines.append(slots)
        assert carry is None, "block ends in a hyphen"
        blocks.append((label, out_lines))
    return blocks


def tok_text(tok):
    return tok.gt if tok.gt is not None else tok.ocr


def block_rect(lines):
    boxes = [s["bbox"] for l in lines for s in l]
    x0 = min(b[0] for b in boxes) - 12
    y0 = min(b[1] for b in boxes) - 12
    x1 = max(b[2] for b in boxes) + 12
    y1 = max(b[3] for b in boxes) + 12
    return (max(x0, 0), max(y0, 0), min(x1, PAGE_W), min(y1, PAGE_H))


# hOCR ---------------------------------------------------------------------

def hocr(page_id, blocks, which, noise=()):
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<!DOCTYPE html PUBLIC "-//W3C//DTD XHTML 1.0 Transitional//EN"'
        ' "http://www.w3.org/TR/xhtml1/DTD/xhtml1-transitional.dtd">',
        '<html xmlns="http://www.w3.org/1999/xhtml" xml:lang="en" lang="en">',
        "<head>",
        f"<title>{page_id}</title>",
        '<meta http-equiv="Content-Type" content="text/html;charset=utf-8"/>',
        '<meta name="ocr-system" content="demo"/>',
        "<meta name='ocr-capabilities' content='ocr_page ocr_carea ocr_line ocrx_word'/>",
        "</head>",
        "<body>",
        f"<div class='ocr_page' id='{page_id}' title='image \"{page_id}.png\"; bbox 0 0 {PAGE_W} {PAGE_H}'>",
    ]
    n_word = 0
    n_line = 0
    for bi, (_, lines) in enumerate(blocks):
        words_by_line = []
        for slots in lines:
            ws = [(s[which], s["bbox"]) for s in slots if s[which] is not None]
            if ws:
                words_by_line.append(ws)
        if not words_by_line:
            continue
        bx = block_rect([[{"bbox": b} for _, b in ws] for ws in words_by_line])
        out.append(f"<div class='ocr_carea' id='block_{bi}' title='bbox {bx[0]} {bx[1]} {bx[2]} {bx[3]}'>")
        for ws in words_by_line:
            n_line += 1
            lb = (min(b[0] for _, b in ws), min(b[1] for _, b in ws), max(b[2] for _, b in ws), max(b[3] for _, b in ws))
            out.append(f"<span class='ocr_line' id='line_{n_line}' title='bbox {lb[0]} {lb[1]} {lb[2]} {lb[3]}'>")
            for text, b in ws:
                n_word += 1
                out.append(
                    f"<span class='ocrx_word' id='word_{n_word}' title='bbox {b[0]} {b[1]} {b[2]} {b[3]}; x_wconf 90'>"
                    f"{escape(text, quote=False)}</span>"
                )
            out.append("</span>")
        out.append("</div>")
    for text, b in noise:
        n_line += 1
        n_word += 1
        out.append(f"<div class='ocr_carea' id='noise_{n_word}' title='bbox {b[0]} {b[1]} {b[2]} {b[3]}'>")
        out.append(f"<span class='ocr_line' id='line_{n_line}' title='bbox {b[0]} {b[1]} {b[2]} {b[3]}'>")
        out.append(f"<span class='ocrx_word' id='word_{n_word}' title='bbox {b[0]} {b[1]} {b[2]} {b[3]}; x_wconf 12'>"
                   f"{escape(text, quote=False)}</span>")
        out.append("</span></div>")
    out += ["</div>", "</body>", "</html>", ""]
    return "\n".join(out)


def via(page_id, blocks):
    regions = []
    for label, lines in blocks:
        if label is None:
            continue
        x0, y0, x1, y1 = block_rect(lines)
        regions.append({
            "shape_attributes": {"name": "rect", "x": x0, "y": y0, "width": x1 - x0, "height": y1 - y0},
            "region_attributes": {"type": label},
        })
    key = f"{page_id}.png0"
    return {"_via_img_metadata": {key: {"filename": f"{page_id}.png", "size": 0, "regions": regions,
                                        "file_attributes": {}}}}


# Independent counting ---------------------------------------------------

GROUPS = {
    "primary_text": "greek_texts",
    "commentary": "commentary_like", "footnote": "commentary_like",
    "introduction": "low_greek_texts", "preface": "low_greek_texts", "translation": "low_greek_texts",
    "app_crit": "critical_apparatus",
    "appendix": "structured_texts", "bibliography": "structured_texts", "index": "structured_texts",
    "title": "structured_texts", "table_of_contents": "structured_texts",
    "page_number": "numbers", "line_number": "numbers",
}
SCOPES = ["global", "greek_texts", "commentary_like", "low_greek_texts", "critical_apparatus",
          "structured_texts", "numbers", "unassigned"]


def counted(text):
    return [c for c in text if not c.isspace() and unicodedata.category(c) != "Cc"]


def is_greek(c):
    o = ord(c)
    return unicodedata.category(c).startswith("L") and (0x370 <= o <= 0x3FF or 0x1F00 <= o <= 0x1FFF)


def is_latin(c):
    o = ord(c)
    return unicodedata.category(c).startswith("L") and (
        0x41 <= o <= 0x5A or 0x61 <= o <= 0x7A or 0xC0 <= o <= 0x24F or 0x1E00 <= o <= 0x1EFF)


def edit_distance(a, b):
    """Plain Wagner-Fischer over full rows."""
    a, b = counted(a), counted(b)
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[len(a)][len(b)]


def scope_of(label):
    return GROUPS[label] if label else "unassigned"


def empty_counts():
    return {s: {"chars": 0, "greek": 0, "latin": 0, "edits": 0, "gt_words": 0, "word_errors": 0} for s in SCOPES}


def add(counts, scope, **kw):
    for s in ("global", scope):
        for k, v in kw.items():
            counts[s][k] += v


def tally(page, blocks, which):
    """Expected per-scope counts for OCR variant `which` ('ocr' or 'post').
    Matching is by identical slot, since OCR words sit on GT bboxes."""
    counts = empty_counts()
    for label, lines in blocks:
        scope = scope_of(label)
        for slots in lines:
            for s in slots:
                gt, ocr = s["gt"], s[which]
                if gt is not None:
                    cs = counted(gt)
                    add(counts, scope, chars=len(cs), greek=sum(map(is_greek, cs)), latin=sum(map(is_latin, cs)),
                        gt_words=1)
                    if ocr is None:
                        add(counts, scope, edits=len(cs), word_errors=1)
                    else:
                        add(counts, scope, edits=edit_distance(gt, ocr), word_errors=int(gt != ocr))
                elif ocr is not None:
                    add(counts, scope, edits=len(counted(ocr)), word_errors=1)
    for text, _ in page["noise"]:
        add(counts, "unassigned", edits=len(counted(text)), word_errors=1)
    return counts


def expected_corrections(page, blocks):
    """Correction-log rows the pipeline should emit for one OCR page:
    dehyphenation rows first, then unique-accent, then confusion-pair."""
    ocr_lines = []  # per OCR line: list of slots with OCR text
    for _, lines in blocks:
        for slots in lines:
            ws = [s for s in slots if s["ocr"] is not None]
            if ws:
                ocr_lines.append(ws)
    rows = {"dehyphenation": [], "unique-accent": [], "confusion-pair": []}
    # a line's tail fragment is consumed before its own hyphen is handled,
    # so indices are counted without tails throughout
    for li, ws in enumerate(ocr_lines):
        kept = [s for s in ws if not s.get("tail")]
        for wi, s in enumerate(kept):
            if "hyph" in s:
                h = s["hyph"]
                rows["dehyphenation"].append((li, wi, f"{h.head} {h.tail}", h.gt))
            if s.get("rule"):
                rows[s["rule"]].append((li, wi, s["ocr"], s["post"]))
    out = []
    for rule in ("dehyphenation", "unique-accent", "confusion-pair"):
        for li, wi, o, c in rows[rule]:
            out.append(f"{page['id']}\t{li}\t{wi}\t{o}\t{c}\t{rule}")
    return out


def greek_cores(text):
    for tok in text.split():
        chars = list(tok)
        letters = [i for i, c in enumerate(chars) if c.isalpha()]
        if not letters:
            continue
        core = "".join(chars[letters[0]:letters[-1] + 1])
        g = sum(map(is_greek, core))
        l = sum(map(is_latin, core))
        if g + l and g / (g + l) > 0.5:
            yield core


def strip_accents(w):
    return nfc("".join(c for c in unicodedata.normalize("NFD", w) if not unicodedata.combining(c)))


# Main ---------------------------------------------------------------------

def write(rel, text):
    path = os.path.join(HERE, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def main():
    lexicon = set(nfc(w) for w in EXTRA_LEXICON)
    stats = {}
    metrics = {}
    corrections = {}
    for page in PAGES:
        blocks = layout(page)
        cid, pid = page["commentary"], page["id"]
        write(f"{cid}/gt/{pid}.html", hocr(pid, blocks, "gt"))
        write(f"{cid}/ocr/{pid}.html", hocr(pid, blocks, "ocr", page["noise"]))
        write(f"{cid}/regions/{pid}.json", json.dumps(via(pid, blocks), ensure_ascii=False, indent=1) + "\n")
        for _, lines in blocks:
            for slots in lines:
                for s in slots:
                    if s["gt"]:
                        lexicon.update(greek_cores(s["gt"]))
        raw = tally(page, blocks, "ocr")
        post = tally(page, blocks, "post")
        for name, counts in (("ocr", raw), ("ocr+post", post)):
            per = metrics.setdefault(name, {}).setdefault(cid, empty_counts())
            for s in SCOPES:
                for k, v in counts[s].items():
                    per[s][k] += v
        st = stats.setdefault(cid, {s: {"char_count": 0, "greek": 0, "latin": 0} for s in SCOPES})
        for s in SCOPES:
            st[s]["char_count"] += raw[s]["chars"]
            st[s]["greek"] += raw[s]["greek"]
            st[s]["latin"] += raw[s]["latin"]
        corrections.setdefault(cid, []).extend(expected_corrections(page, blocks))

    # every seeded accent error must have a single accented realization
    skeletons = {}
    for w in lexicon:
        skeletons.setdefault(strip_accents(w), set()).add(w)
    for page in PAGES:
        for _, lines in layout(page):
            for slots in lines:
                for s in slots:
                    if s.get("rule") == "unique-accent":
                        core = next(greek_cores(s["post"]))
                        assert skeletons[strip_accents(core)] == {core}, core

    write("lexicons/greek.txt", "# demo wordlist\n" + "".join(w + "\n" for w in sorted(lexicon)))
    write("golden/expected_stats.json", json.dumps(stats, ensure_ascii=False, indent=1, sort_keys=True) + "\n")
    write("golden/expected_counts.json", json.dumps(metrics, ensure_ascii=False, indent=1, sort_keys=True) + "\n")
    for cid, rows in corrections.items():
        write(f"golden/corrections/{cid}.tsv", "page\tline\tword\toriginal\tcorrected\trule\n"
              + "".join(r + "\n" for r in rows))


if __name__ == "__main__":
    main()
