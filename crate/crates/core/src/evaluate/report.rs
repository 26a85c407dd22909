use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Scope, ScopeTallies, Tally, aggregate_weighted, nld_from_cer};

pub const CHAR_UNIT_NOTE: &str =
    "NFC codepoints excluding whitespace and control characters; letters, digits and punctuation are counted";
pub const CER_DENOMINATOR_NOTE: &str =
    "edits (matched-pair edit distance + unmatched GT chars + unmatched OCR chars) over GT chars, capped at 1";
pub const STD_NOTE: &str = "mean and population std across commentaries, weighted by GT char count; NLD = 1 - CER";

/// Counts for one commentary under one pipeline.
#[derive(Debug, Clone)]
pub struct CommentaryResult {
    pub id: String,
    pub tallies: ScopeTallies,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub name: String,
    pub commentaries: Vec<CommentaryResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMetadata {
    pub generated_at: String,
    pub iou_threshold: f64,
    pub groups: bool,
    pub char_unit: String,
    pub cer_denominator: String,
    pub aggregation: String,
}

impl ReportMetadata {
    pub fn new(generated_at: impl Into<String>, iou_threshold: f64, groups: bool) -> Self {
        Self {
            generated_at: generated_at.into(),
            iou_threshold,
            groups,
            char_unit: CHAR_UNIT_NOTE.into(),
            cer_denominator: CER_DENOMINATOR_NOTE.into(),
            aggregation: STD_NOTE.into(),
        }
    }
}

/// One scope of one pipeline, aggregated over commentaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScopeRow {
    pub scope: String,
    pub char_count: u64,
    pub greek_pct: f64,
    pub edits: u64,
    pub cer: f64,
    pub cer_std: f64,
    pub nld: f64,
    pub wer: f64,
    pub wer_std: f64,
    pub bow_f1: f64,
    pub bow_f1_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommentaryRow {
    pub commentary: String,
    pub char_count: u64,
    pub edits: u64,
    pub cer: f64,
    pub nld: f64,
    pub wer: f64,
    pub bow_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineReport {
    pub pipeline: String,
    pub scopes: Vec<ScopeRow>,
    pub commentaries: Vec<CommentaryRow>,
}

/// Evaluation results: one block per pipeline, each with a row per scope
/// and a row per commentary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub metadata: ReportMetadata,
    pub pipelines: Vec<PipelineReport>,
}

impl MetricsReport {
    /// With `metadata.groups` off only the Global row is kept. The
    /// Unassigned row appears only when it holds something.
    pub fn build(metadata: ReportMetadata, results: &[PipelineResult]) -> Self {
        let pipelines = results.iter().map(|p| pipeline_report(p, metadata.groups)).collect();
        Self { metadata, pipelines }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks that NLD is exactly 1 - CER on every row and that scope char
    /// counts and edits add up to the Global row.
    pub fn check_invariants(&self) -> Result<(), String> {
        for p in &self.pipelines {
            for r in &p.scopes {
                if r.nld != 1.0 - r.cer {
                    return Err(format!("{}/{}: nld {} != 1 - cer {}", p.pipeline, r.scope, r.nld, r.cer));
                }
            }
            for r in &p.commentaries {
                if r.nld != 1.0 - r.cer {
                    return Err(format!("{}/{}: nld {} != 1 - cer {}", p.pipeline, r.commentary, r.nld, r.cer));
                }
            }
            let Some(global) = p.scopes.iter().find(|r| r.scope == Scope::Global.key()) else {
                return Err(format!("{}: no global row", p.pipeline));
            };
            let parts: Vec<&ScopeRow> = p.scopes.iter().filter(|r| r.scope != Scope::Global.key()).collect();
            if !parts.is_empty() {
                let chars: u64 = parts.iter().map(|r| r.char_count).sum();
                let edits: u64 = parts.iter().map(|r| r.edits).sum();
                if chars != global.char_count || edits != global.edits {
                    return Err(format!(
                        "{}: scopes sum to {chars} chars / {edits} edits, global has {} / {}",
                        p.pipeline, global.char_count, global.edits
                    ));
                }
            }
            let chars: u64 = p.commentaries.iter().map(|r| r.char_count).sum();
            let edits: u64 = p.commentaries.iter().map(|r| r.edits).sum();
            if chars != global.char_count || edits != global.edits {
                return Err(format!("{}: commentaries do not sum to the global row", p.pipeline));
            }
        }
        Ok(())
    }

    /// Two tables: Global and per-group results per pipeline, then F1, CER
    /// and NLD per commentary.
    pub fn to_markdown(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# OCR evaluation report\n");
        let _ = writeln!(out, "- generated: {}", m.generated_at);
        let _ = writeln!(out, "- IoU threshold: {}", m.iou_threshold);
        let _ = writeln!(out, "- characters: {}", m.char_unit);
        let _ = writeln!(out, "- CER: {}", m.cer_denominator);
        let _ = writeln!(out, "- aggregation: {}\n", m.aggregation);

        let Some(first) = self.pipelines.first() else {
            out.push_str("No pipelines evaluated.\n");
            return out;
        };
        let scopes: Vec<&str> = first.scopes.iter().map(|r| r.scope.as_str()).collect();
        let groups = &scopes[1.min(scopes.len())..];

        let _ = writeln!(out, "## Global and per-group results\n");
        let mut header = String::from("| Region | Global F1 | Global CER | Global WER |");
        let mut rule = String::from("|---|---|---|---|");
        let mut counts = format!("| Nb. of chars (% Greek) | {} | | |", chars_cell(first.scopes.first()));
        for key in groups {
            let _ = write!(header, " {} CER |", scope_label(key));
            rule.push_str("---|");
            let _ = write!(counts, " {} |", chars_cell(first.scopes.iter().find(|r| r.scope == *key)));
        }
        let _ = writeln!(out, "{header}\n{rule}\n{counts}");
        for p in &self.pipelines {
            let g = p.scopes.iter().find(|r| r.scope == Scope::Global.key());
            let mut row = format!("| {} |", p.pipeline);
            match g {
                Some(g) => {
                    let _ = write!(
                        row,
                        " {} | {} | {} |",
                        pm(g.bow_f1, g.bow_f1_std),
                        pm(g.cer, g.cer_std),
                        pm(g.wer, g.wer_std)
                    );
                }
                None => row.push_str(" - | - | - |"),
            }
            for key in groups {
                match p.scopes.iter().find(|r| r.scope == *key) {
                    Some(r) if r.char_count > 0 => {
                        let _ = write!(row, " {} |", pm(r.cer, r.cer_std));
                    }
                    _ => row.push_str(" - |"),
                }
            }
            let _ = writeln!(out, "{row}");
        }

        let mut ids: Vec<&str> = Vec::new();
        for p in &self.pipelines {
            for c in &p.commentaries {
                if !ids.contains(&c.commentary.as_str()) {
                    ids.push(&c.commentary);
                }
            }
        }
        let _ = writeln!(out, "\n## Per-commentary results\n");
        let mut header = String::from("| Pipeline |");
        let mut rule = String::from("|---|");
        for id in &ids {
            let _ = write!(header, " {id} F1 | {id} CER | {id} NLD |");
            rule.push_str("---|---|---|");
        }
        let _ = writeln!(out, "{header}\n{rule}");
        for p in &self.pipelines {
            let mut row = format!("| {} |", p.pipeline);
            for id in &ids {
                match p.commentaries.iter().find(|c| c.commentary == *id) {
                    Some(c) => {
                        let _ = write!(row, " {} | {} | {} |", frac(c.bow_f1), frac(c.cer), frac(c.nld));
                    }
                    None => row.push_str(" - | - | - |"),
                }
            }
            let _ = writeln!(out, "{row}");
        }
        out
    }
}

fn scope_label(key: &str) -> String {
    match Scope::all().find(|s| s.key() == key) {
        Some(s) => s.label().to_owned(),
        None => key.to_owned(),
    }
}

fn chars_cell(row: Option<&ScopeRow>) -> String {
    match row {
        Some(r) => format!("{} ({:.0}%)", r.char_count, r.greek_pct * 100.0),
        None => "-".into(),
    }
}

/// Two decimals without the leading zero, as in `.18`.
fn frac(v: f64) -> String {
    let s = format!("{v:.2}");
    match s.strip_prefix("0.") {
        Some(rest) => format!(".{rest}"),
        None => s,
    }
}

fn pm(v: f64, std: f64) -> String {
    format!("{}±{}", frac(v), frac(std))
}

fn pipeline_report(p: &PipelineResult, groups: bool) -> PipelineReport {
    let mut pooled = ScopeTallies::default();
    for c in &p.commentaries {
        pooled.merge(&c.tallies);
    }
    let scopes: Vec<Scope> = if groups { Scope::all().collect() } else { vec![Scope::Global] };
    let rows = scopes
        .into_iter()
        .filter(|s| *s != Scope::Unassigned || pooled.get(*s).is_some_and(|t| t.gt_chars > 0 || t.edits > 0))
        .map(|s| scope_row(s, &pooled.tally(s), p))
        .collect();
    let commentaries = p
        .commentaries
        .iter()
        .map(|c| {
            let t = c.tallies.tally(Scope::Global);
            let cer = t.cer();
            CommentaryRow {
                commentary: c.id.clone(),
                char_count: t.gt_chars,
                edits: t.edits,
                cer,
                nld: nld_from_cer(cer),
                wer: t.wer(),
                bow_f1: t.bag_of_words().f1,
            }
        })
        .collect();
    PipelineReport { pipeline: p.name.clone(), scopes: rows, commentaries }
}

/// Char-weighted mean and std of a metric across commentaries. Falls back
/// to the pooled value when no commentary has GT in the scope.
fn across(p: &PipelineResult, scope: Scope, pooled: f64, metric: impl Fn(&Tally) -> f64) -> (f64, f64) {
    let values: Vec<(f64, f64)> =
        p.commentaries.iter().filter_map(|c| c.tallies.get(scope)).map(|t| (metric(t), t.gt_chars as f64)).collect();
    aggregate_weighted(&values).unwrap_or((pooled, 0.0))
}

fn scope_row(scope: Scope, t: &Tally, p: &PipelineResult) -> ScopeRow {
    let (cer, cer_std) = across(p, scope, t.cer(), Tally::cer);
    let (wer, wer_std) = across(p, scope, t.wer(), Tally::wer);
    let (bow_f1, bow_f1_std) = across(p, scope, t.bag_of_words().f1, |t| t.bag_of_words().f1);
    ScopeRow {
        scope: scope.key().into(),
        char_count: t.gt_chars,
        greek_pct: t.greek_pct(),
        edits: t.edits,
        cer,
        cer_std,
        nld: nld_from_cer(cer),
        wer,
        wer_std,
        bow_f1,
        bow_f1_std,
    }
}
