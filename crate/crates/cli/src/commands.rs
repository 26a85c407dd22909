use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use commentary_ocr::docmodel::{Page, RegionVocabulary, write_canonical};
use commentary_ocr::evaluate::{
    CHAR_UNIT_NOTE, CommentaryResult, CorpusStats, MetricsReport, PipelineResult, ReportMetadata, Scope, ScopeTallies,
    corpus_stats, evaluate_page,
};
use commentary_ocr::lexicon::{Lexicon, UniqueAccentIndex, build_unique_accent_index, load_wordlist};
use commentary_ocr::postprocess::{ConfusionPairTable, CorrectionLog, PipelineConfig, PipelineResources, run_pipeline};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;
use crate::corpus::{gt_files, list_pages, load_gt_page, load_page, pair_pages};
use crate::manifest::RunManifest;

pub const METRICS_JSON: &str = "metrics.json";
pub const METRICS_MD: &str = "metrics.md";
pub const STATS_JSON: &str = "stats.json";
pub const STATS_MD: &str = "stats.md";
pub const POSTPROCESSED_DIR: &str = "postprocessed";
/// Suffix of the pipeline name under which post-processed OCR is reported.
pub const POST_SUFFIX: &str = "+post";

/// Parses an RFC 3339 timestamp into the form written to reports.
pub fn normalize_timestamp(ts: &str) -> Result<String, CliError> {
    chrono::DateTime::parse_from_rfc3339(ts)
        .map(|t| t.to_utc().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .map_err(|_| CliError::Timestamp(ts.to_owned()))
}

pub fn now_timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn vocabulary(m: &RunManifest) -> Result<RegionVocabulary, CliError> {
    match &m.regions {
        Some(p) => RegionVocabulary::load(p).map_err(|source| CliError::Document { path: p.clone(), source }),
        None => Ok(RegionVocabulary::default()),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Loads every GT page of every commentary, in manifest then page-id order.
fn load_gt(m: &RunManifest, vocab: &RegionVocabulary) -> Result<Vec<Vec<Page>>, CliError> {
    m.commentaries
        .iter()
        .map(|c| {
            let files = gt_files(c)?;
            files
                .par_iter()
                .map(|(_, path, ann)| load_gt_page(path, ann.as_deref(), vocab))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub scope: String,
    pub char_count: u64,
    pub greek_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsEntry {
    pub id: String,
    pub pages: usize,
    pub scopes: Vec<StatsRow>,
}

/// Character counts and Greek share per region group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub generated_at: String,
    pub char_unit: String,
    pub commentaries: Vec<StatsEntry>,
    pub total: StatsEntry,
}

fn stats_entry(id: &str, pages: usize, stats: &CorpusStats) -> StatsEntry {
    StatsEntry {
        id: id.to_owned(),
        pages,
        scopes: stats
            .iter()
            .map(|(s, c)| StatsRow { scope: s.key().to_owned(), char_count: c.char_count, greek_pct: c.greek_pct() })
            .collect(),
    }
}

impl StatsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Corpus statistics\n\n");
        let _ = writeln!(out, "- generated: {}", self.generated_at);
        let _ = writeln!(out, "- characters: {}\n", self.char_unit);
        let mut header = String::from("| Commentary | Pages |");
        let mut rule = String::from("|---|---|");
        for s in Scope::all() {
            let _ = write!(header, " {} |", s.label());
            rule.push_str("---|");
        }
        let _ = writeln!(out, "{header}\n{rule}");
        for e in self.commentaries.iter().chain(std::iter::once(&self.total)) {
            let mut row = format!("| {} | {} |", e.id, e.pages);
            for r in &e.scopes {
                let _ = write!(row, " {} ({:.0}%) |", r.char_count, r.greek_pct * 100.0);
            }
            let _ = writeln!(out, "{row}");
        }
        out
    }
}

/// Counts GT characters per region group, for each commentary and in
/// total. Writes `stats.json` and `stats.md` to the output directory.
pub fn cmd_stats(m: &RunManifest, timestamp: &str) -> Result<StatsReport, CliError> {
    m.check_paths()?;
    let vocab = vocabulary(m)?;
    let gt = load_gt(m, &vocab)?;
    let mut total = CorpusStats::default();
    let mut entries = Vec::new();
    for (c, pages) in m.commentaries.iter().zip(&gt) {
        let stats = corpus_stats(pages, &vocab);
        total.merge(&stats);
        entries.push(stats_entry(&c.id, pages.len(), &stats));
    }
    let n_pages = gt.iter().map(Vec::len).sum();
    let report = StatsReport {
        generated_at: timestamp.to_owned(),
        char_unit: CHAR_UNIT_NOTE.to_owned(),
        commentaries: entries,
        total: stats_entry("total", n_pages, &total),
    };
    let global = total.get(Scope::Global).char_count;
    let parts: u64 = total.iter().filter(|(s, _)| *s != Scope::Global).map(|(_, c)| c.char_count).sum();
    if parts != global {
        return Err(CliError::Invariant(format!("group char counts sum to {parts}, global is {global}")));
    }
    write_file(&m.output_dir.join(STATS_JSON), report.to_json().as_bytes())?;
    write_file(&m.output_dir.join(STATS_MD), report.to_markdown().as_bytes())?;
    Ok(report)
}

/// Post-processing configuration and the resources it needs, loaded once.
pub struct Postprocessor {
    pub config: PipelineConfig,
    lexicon: Option<Lexicon>,
    index: Option<UniqueAccentIndex>,
    table: ConfusionPairTable,
}

impl Postprocessor {
    /// Loads the pipeline config and the lexicons it needs. A stage whose
    /// resource is not configured fails here, naming the stage.
    pub fn load(m: &RunManifest) -> Result<Self, CliError> {
        let config = match &m.pipeline_config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        let table = config.load_confusion_table()?;
        let lexicon = m.lexicons.main.as_deref().map(load_wordlist).transpose()?;
        let index = match &m.lexicons.unique_accent {
            Some(p) if Some(p) == m.lexicons.main.as_ref() => lexicon.as_ref().map(build_unique_accent_index),
            Some(p) => Some(build_unique_accent_index(&load_wordlist(p)?)),
            None => None,
        };
        let pp = Self { config, lexicon, index, table };
        pp.run(&Page::empty("check", (1, 1)))?;
        Ok(pp)
    }

    pub fn run(&self, page: &Page) -> Result<(Page, CorrectionLog), CliError> {
        let res = PipelineResources {
            unique_accent: self.index.as_ref(),
            lexicon: self.lexicon.as_ref(),
            confusion_table: Some(&self.table),
        };
        Ok(run_pipeline(page, &self.config, &res)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PostprocessSummary {
    pub pages: usize,
    pub corrections: usize,
    pub unresolved_hyphens: usize,
    pub output_dir: PathBuf,
}

/// Runs post-processing over every OCR page. Writes corrected pages as
/// canonical JSON to `postprocessed/<pipeline>/<commentary>/<page>.json`
/// and the correction log of each commentary beside them.
pub fn cmd_postprocess(m: &RunManifest) -> Result<PostprocessSummary, CliError> {
    m.check_paths()?;
    let vocab = vocabulary(m)?;
    let pp = Postprocessor::load(m)?;
    let out_root = m.output_dir.join(POSTPROCESSED_DIR);
    let mut summary = PostprocessSummary { output_dir: out_root.clone(), ..Default::default() };

    for c in &m.commentaries {
        for (pipeline, dir) in &c.ocr {
            let files: Vec<(String, PathBuf)> = list_pages(dir)?.into_iter().collect();
            let results = files
                .par_iter()
                .map(|(_, path)| pp.run(&load_page(path, &vocab)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let out_dir = out_root.join(pipeline).join(&c.id);
            let mut log = CorrectionLog::default();
            for (page, page_log) in results {
                write_file(&out_dir.join(format!("{}.json", page.id)), &write_canonical(&page))?;
                log.extend(page_log);
                summary.pages += 1;
            }
            summary.corrections += log.len();
            summary.unresolved_hyphens += log.unresolved().len();
            let mut tsv = Vec::new();
            log.write_tsv(&mut tsv).expect("write to memory");
            write_file(&out_dir.join("corrections.tsv"), &tsv)?;
            let mut unresolved = String::from("page\tline\tword\ttext\n");
            for u in log.unresolved() {
                let _ = writeln!(unresolved, "{}\t{}\t{}\t{}", u.page, u.line, u.word, u.text);
            }
            write_file(&out_dir.join("unresolved_hyphens.tsv"), unresolved.as_bytes())?;
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateOptions {
    pub iou: f64,
    pub groups: bool,
    pub timestamp: String,
    /// Also evaluate each OCR pipeline after post-processing, reported as
    /// `<pipeline>+post`.
    pub postprocess: bool,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            iou: commentary_ocr::evaluate::DEFAULT_IOU_THRESHOLD,
            groups: true,
            timestamp: now_timestamp(),
            postprocess: false,
        }
    }
}

struct Task<'a> {
    commentary: usize,
    pipeline: &'a str,
    gt: &'a Page,
    ocr_path: PathBuf,
}

/// Aligns every OCR page with its GT page and writes `metrics.json` and
/// `metrics.md`. Page sets must match exactly per commentary and pipeline.
pub fn cmd_evaluate(m: &RunManifest, opts: &EvaluateOptions) -> Result<MetricsReport, CliError> {
    m.check_paths()?;
    let vocab = vocabulary(m)?;
    let pp = if opts.postprocess { Some(Postprocessor::load(m)?) } else { None };
    let gt = load_gt(m, &vocab)?;
    let pipelines = m.pipelines();

    let mut tasks = Vec::new();
    for (ci, c) in m.commentaries.iter().enumerate() {
        let gt_by_id: BTreeMap<String, &Page> = gt[ci].iter().map(|p| (p.id.clone(), p)).collect();
        let gt_ids: BTreeMap<String, PathBuf> = gt_by_id.keys().map(|k| (k.clone(), PathBuf::new())).collect();
        for (pipeline, dir) in &c.ocr {
            let ocr = list_pages(dir)?;
            for id in pair_pages(&c.id, &gt_ids, &ocr)? {
                tasks.push(Task { commentary: ci, pipeline, gt: gt_by_id[&id], ocr_path: ocr[&id].clone() });
            }
        }
    }

    let evaluated = tasks
        .par_iter()
        .map(|t| {
            let ocr = load_page(&t.ocr_path, &vocab)?;
            let eval = |page: &Page| {
                evaluate_page(t.gt, page, &vocab, opts.iou).map(|e| e.tallies).map_err(|source| CliError::Evaluate {
                    commentary: m.commentaries[t.commentary].id.clone(),
                    page: t.gt.id.clone(),
                    source,
                })
            };
            let raw = eval(&ocr)?;
            let post = match &pp {
                Some(pp) => Some(eval(&pp.run(&ocr)?.0)?),
                None => None,
            };
            Ok((raw, post))
        })
        .collect::<Result<Vec<(ScopeTallies, Option<ScopeTallies>)>, CliError>>()?;

    // fold in task order, which is manifest then page-id order
    let mut pooled: BTreeMap<(String, usize), ScopeTallies> = BTreeMap::new();
    for (t, (raw, post)) in tasks.iter().zip(evaluated) {
        pooled.entry((t.pipeline.to_owned(), t.commentary)).or_default().merge(&raw);
        if let Some(post) = post {
            pooled.entry((format!("{}{POST_SUFFIX}", t.pipeline), t.commentary)).or_default().merge(&post);
        }
    }
    let mut names = Vec::new();
    for p in &pipelines {
        names.push(p.clone());
        if opts.postprocess {
            names.push(format!("{p}{POST_SUFFIX}"));
        }
    }
    let results: Vec<PipelineResult> = names
        .into_iter()
        .map(|name| PipelineResult {
            commentaries: m
                .commentaries
                .iter()
                .enumerate()
                .filter_map(|(ci, c)| {
                    pooled.get(&(name.clone(), ci)).map(|t| CommentaryResult { id: c.id.clone(), tallies: t.clone() })
                })
                .collect(),
            name,
        })
        .collect();

    let report = MetricsReport::build(ReportMetadata::new(&opts.timestamp, opts.iou, opts.groups), &results);
    report.check_invariants().map_err(CliError::Invariant)?;
    write_file(&m.output_dir.join(METRICS_JSON), report.to_json().as_bytes())?;
    write_file(&m.output_dir.join(METRICS_MD), report.to_markdown().as_bytes())?;
    Ok(report)
}

/// Re-reads `metrics.json`, checks its invariants and renders `metrics.md`.
pub fn cmd_report(m: &RunManifest) -> Result<String, CliError> {
    let path = m.output_dir.join(METRICS_JSON);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let report =
        MetricsReport::from_json(&text).map_err(|e| CliError::Report { path: path.clone(), message: e.to_string() })?;
    report.check_invariants().map_err(CliError::Invariant)?;
    let md = report.to_markdown();
    write_file(&m.output_dir.join(METRICS_MD), md.as_bytes())?;
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps() {
        assert_eq!(normalize_timestamp("2024-01-01T00:00:00Z").unwrap(), "2024-01-01T00:00:00Z");
        assert_eq!(normalize_timestamp("2024-01-01T02:00:00+02:00").unwrap(), "2024-01-01T00:00:00Z");
        assert!(normalize_timestamp("yesterday").is_err());
    }
}
