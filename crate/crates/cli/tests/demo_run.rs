mod common;

use commentary_ocr::docmodel::{RegionVocabulary, write_canonical};
use commentary_ocr_cli::commands::POSTPROCESSED_DIR;
use commentary_ocr_cli::corpus::load_page;
use commentary_ocr_cli::{EvaluateOptions, RunManifest, cmd_evaluate, cmd_postprocess, cmd_report, cmd_stats};
use common::{demo_copy, golden, manifest};
use serde_json::Value;

const TS: &str = "2024-01-01T00:00:00Z";

fn opts(groups: bool, postprocess: bool) -> EvaluateOptions {
    EvaluateOptions { iou: 0.3, groups, timestamp: TS.into(), postprocess }
}

#[test]
fn stats_match_token_table() {
    let dir = demo_copy();
    let report = cmd_stats(&manifest(dir.path()), TS).unwrap();
    let expected: Value = serde_json::from_str(&golden("expected_stats.json")).unwrap();
    for entry in &report.commentaries {
        for row in &entry.scopes {
            let e = &expected[&entry.id][&row.scope];
            assert_eq!(row.char_count, e["char_count"].as_u64().unwrap(), "{}/{}", entry.id, row.scope);
            let (g, l) = (e["greek"].as_f64().unwrap(), e["latin"].as_f64().unwrap());
            let pct = if g + l == 0.0 { 0.0 } else { g / (g + l) };
            assert!((row.greek_pct - pct).abs() < 1e-12, "{}/{}", entry.id, row.scope);
        }
    }
    let written = std::fs::read_to_string(dir.path().join("out/stats.json")).unwrap();
    assert_eq!(written, golden("stats.json"));
}

#[test]
fn corrections_match_token_table() {
    let dir = demo_copy();
    let summary = cmd_postprocess(&manifest(dir.path())).unwrap();
    assert_eq!(summary.pages, 3);
    for c in ["jebb_demo", "wecklein_demo"] {
        let path = dir.path().join("out").join(POSTPROCESSED_DIR).join("ocr").join(c).join("corrections.tsv");
        assert_eq!(std::fs::read_to_string(path).unwrap(), golden(&format!("corrections/{c}.tsv")), "{c}");
    }
}

#[test]
fn disabled_stages_copy_pages_unchanged() {
    let dir = demo_copy();
    std::fs::write(dir.path().join("pipeline.toml"), "stages = []\n").unwrap();
    let m = manifest(dir.path());
    let summary = cmd_postprocess(&m).unwrap();
    assert_eq!(summary.corrections, 0);
    let vocab = RegionVocabulary::default();
    for c in &m.commentaries {
        for entry in std::fs::read_dir(&c.ocr["ocr"]).unwrap() {
            let path = entry.unwrap().path();
            let page = load_page(&path, &vocab).unwrap();
            let out = m.output_dir.join(POSTPROCESSED_DIR).join("ocr").join(&c.id).join(format!("{}.json", page.id));
            assert_eq!(std::fs::read(out).unwrap(), write_canonical(&page));
        }
    }
}

#[test]
fn missing_lexicon_names_the_stage() {
    let dir = demo_copy();
    let text = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    let text = text.replace("[lexicons]\nmain = \"lexicons/greek.txt\"\n", "");
    std::fs::write(dir.path().join("manifest.toml"), text).unwrap();
    std::fs::write(dir.path().join("pipeline.toml"), "stages = [\"unique_accent\"]\n").unwrap();
    let msg = cmd_postprocess(&manifest(dir.path())).unwrap_err().to_string();
    assert!(msg.contains("unique_accent"), "{msg}");
}

#[test]
fn empty_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    std::fs::write(&path, "output_dir = \"out\"\n").unwrap();
    let m = RunManifest::load(&path).unwrap();
    assert_eq!(cmd_stats(&m, TS).unwrap_err().to_string(), "no commentaries");
    assert_eq!(cmd_evaluate(&m, &opts(true, false)).unwrap_err().to_string(), "no commentaries");
}

#[test]
fn orphan_pages_are_listed() {
    let dir = demo_copy();
    let ocr = dir.path().join("jebb_demo/ocr");
    std::fs::copy(ocr.join("p0002.html"), ocr.join("p0009.html")).unwrap();
    std::fs::remove_file(ocr.join("p0001.html")).unwrap();
    let msg = cmd_evaluate(&manifest(dir.path()), &opts(true, false)).unwrap_err().to_string();
    assert!(msg.contains("OCR pages without GT: p0009"), "{msg}");
    assert!(msg.contains("GT pages without OCR: p0001"), "{msg}");
}

#[test]
fn evaluation_matches_golden_and_token_table() {
    let dir = demo_copy();
    let m = manifest(dir.path());
    let report = cmd_evaluate(&m, &opts(true, true)).unwrap();
    assert_eq!(report.to_json(), golden("metrics.json"));
    assert_eq!(std::fs::read_to_string(dir.path().join("out/metrics.md")).unwrap(), golden("metrics.md"));

    let expected: Value = serde_json::from_str(&golden("expected_counts.json")).unwrap();
    for p in &report.pipelines {
        for row in &p.commentaries {
            let e = &expected[&p.pipeline][&row.commentary]["global"];
            assert_eq!(row.char_count, e["chars"].as_u64().unwrap());
            assert_eq!(row.edits, e["edits"].as_u64().unwrap(), "{}/{}", p.pipeline, row.commentary);
        }
        for row in &p.scopes {
            let sum = |field: &str| -> u64 {
                expected[&p.pipeline].as_object().unwrap().values().filter_map(|c| c[&row.scope][field].as_u64()).sum()
            };
            assert_eq!(row.char_count, sum("chars"), "{}/{}", p.pipeline, row.scope);
            assert_eq!(row.edits, sum("edits"), "{}/{}", p.pipeline, row.scope);
        }
    }
    let raw = &report.pipelines[0];
    let post = &report.pipelines[1];
    assert_eq!(post.pipeline, "ocr+post");
    assert!(post.scopes[0].cer < raw.scopes[0].cer);

    // re-rendering from the JSON gives the same Markdown
    assert_eq!(cmd_report(&m).unwrap(), golden("metrics.md"));
}

#[test]
fn groups_off_keeps_global_only() {
    let dir = demo_copy();
    let report = cmd_evaluate(&manifest(dir.path()), &opts(false, false)).unwrap();
    for p in &report.pipelines {
        let scopes: Vec<&str> = p.scopes.iter().map(|r| r.scope.as_str()).collect();
        assert_eq!(scopes, ["global"]);
    }
    let md = std::fs::read_to_string(dir.path().join("out/metrics.md")).unwrap();
    assert!(!md.contains("Comm.") && !md.contains("App. Crit."), "{md}");
}
