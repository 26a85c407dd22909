//! Run manifest: a TOML file describing commentaries, OCR outputs,
//! lexicons and configs. Relative paths resolve against `root`, which
//! itself defaults to the manifest's directory.
//!
//! ```toml
//! output_dir = "out"
//! pipeline_config = "pipeline.toml"
//!
//! [lexicons]
//! main = "greek.txt"
//!
//! [[commentary]]
//! id = "sophocles_jebb"
//! language = "eng"
//! gt = "jebb/gt"
//! annotations = "jebb/regions"
//! ocr = { kraken = "jebb/ocr/kraken" }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// Directory searched for lexicon files when the manifest sets no
/// `lexicon_dir`.
pub const LEXICON_DIR_ENV: &str = "COMMENTARY_OCR_LEXICON_DIR";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    root: Option<PathBuf>,
    output_dir: PathBuf,
    pipeline_config: Option<PathBuf>,
    regions: Option<PathBuf>,
    lexicon_dir: Option<PathBuf>,
    #[serde(default)]
    lexicons: RawLexicons,
    #[serde(default)]
    commentary: Vec<RawCommentary>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLexicons {
    main: Option<PathBuf>,
    unique_accent: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommentary {
    id: String,
    #[serde(default)]
    language: String,
    gt: PathBuf,
    annotations: Option<PathBuf>,
    #[serde(default)]
    ocr: OcrDirs,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OcrDirs {
    Single(PathBuf),
    Named(BTreeMap<String, PathBuf>),
}

impl Default for OcrDirs {
    fn default() -> Self {
        OcrDirs::Named(BTreeMap::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commentary {
    pub id: String,
    pub language: String,
    pub gt: PathBuf,
    pub annotations: Option<PathBuf>,
    /// OCR page directories keyed by pipeline name.
    pub ocr: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicons {
    pub main: Option<PathBuf>,
    pub unique_accent: Option<PathBuf>,
}

/// A manifest with every path resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub path: PathBuf,
    pub root: PathBuf,
    pub output_dir: PathBuf,
    pub pipeline_config: Option<PathBuf>,
    pub regions: Option<PathBuf>,
    pub lexicons: Lexicons,
    pub commentaries: Vec<Commentary>,
}

impl RunManifest {
    /// Reads and resolves a manifest. The lexicon directory falls back to
    /// `$COMMENTARY_OCR_LEXICON_DIR`, then to the root.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        let env_dir = std::env::var_os(LEXICON_DIR_ENV).map(PathBuf::from);
        Self::parse(&text, path, env_dir)
    }

    pub fn parse(text: &str, path: &Path, env_lexicon_dir: Option<PathBuf>) -> Result<Self, CliError> {
        let bad = |message: String| CliError::Manifest { path: path.to_owned(), message };
        let raw: RawManifest = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("")).to_owned();
        let root = match raw.root {
            Some(r) => base.join(r),
            None => base,
        };
        let at = |p: PathBuf| root.join(p);
        let lexicon_dir = match raw.lexicon_dir {
            Some(d) => at(d),
            None => env_lexicon_dir.map(|d| root.join(d)).unwrap_or_else(|| root.clone()),
        };

        let mut seen = HashSet::new();
        let mut commentaries = Vec::new();
        for c in raw.commentary {
            if c.id.trim().is_empty() {
                return Err(bad("commentary with empty id".into()));
            }
            if !seen.insert(c.id.clone()) {
                return Err(bad(format!("duplicate commentary id {:?}", c.id)));
            }
            let ocr = match c.ocr {
                OcrDirs::Single(p) => BTreeMap::from([("ocr".to_owned(), at(p))]),
                OcrDirs::Named(m) => m.into_iter().map(|(k, v)| (k, at(v))).collect(),
            };
            commentaries.push(Commentary {
                id: c.id,
                language: c.language,
                gt: at(c.gt),
                annotations: c.annotations.map(at),
                ocr,
            });
        }

        let unique_accent = raw.lexicons.unique_accent.or_else(|| raw.lexicons.main.clone());
        Ok(Self {
            path: path.to_owned(),
            output_dir: at(raw.output_dir),
            pipeline_config: raw.pipeline_config.map(at),
            regions: raw.regions.map(at),
            lexicons: Lexicons {
                main: raw.lexicons.main.map(|p| lexicon_dir.join(p)),
                unique_accent: unique_accent.map(|p| lexicon_dir.join(p)),
            },
            commentaries,
            root,
        })
    }

    /// Fails with [`CliError::NoCommentaries`] or the list of referenced
    /// paths that do not exist.
    pub fn check_paths(&self) -> Result<(), CliError> {
        if self.commentaries.is_empty() {
            return Err(CliError::NoCommentaries);
        }
        let mut paths: Vec<&Path> = Vec::new();
        paths.extend(self.pipeline_config.as_deref());
        paths.extend(self.regions.as_deref());
        paths.extend(self.lexicons.main.as_deref());
        paths.extend(self.lexicons.unique_accent.as_deref());
        for c in &self.commentaries {
            paths.push(&c.gt);
            paths.extend(c.annotations.as_deref());
            paths.extend(c.ocr.values().map(PathBuf::as_path));
        }
        let missing: Vec<PathBuf> = paths.into_iter().filter(|p| !p.exists()).map(Path::to_owned).collect();
        if missing.is_empty() { Ok(()) } else { Err(CliError::MissingPaths(missing)) }
    }

    /// Pipeline names across all commentaries, sorted.
    pub fn pipelines(&self) -> Vec<String> {
        let mut names: Vec<String> = self.commentaries.iter().flat_map(|c| c.ocr.keys().cloned()).collect();
        names.sort();
        names.dedup();
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
output_dir = "out"
pipeline_config = "pipeline.toml"

[lexicons]
main = "greek.txt"

[[commentary]]
id = "a"
language = "lat"
gt = "a/gt"
annotations = "a/regions"
ocr = { kraken = "a/kraken", tesseract = "a/tess" }

[[commentary]]
id = "b"
gt = "b/gt"
ocr = "b/ocr"
"#;

    #[test]
    fn paths_resolve_against_manifest_dir() {
        let m = RunManifest::parse(TEXT, Path::new("/data/run.toml"), None).unwrap();
        assert_eq!(m.output_dir, Path::new("/data/out"));
        assert_eq!(m.commentaries[0].ocr["kraken"], Path::new("/data/a/kraken"));
        assert_eq!(m.commentaries[1].ocr["ocr"], Path::new("/data/b/ocr"));
        assert_eq!(m.lexicons.main.as_deref(), Some(Path::new("/data/greek.txt")));
        assert_eq!(m.lexicons.unique_accent, m.lexicons.main);
        assert_eq!(m.pipelines(), vec!["kraken", "ocr", "tesseract"]);
    }

    #[test]
    fn env_lexicon_dir() {
        let m = RunManifest::parse(TEXT, Path::new("/data/run.toml"), Some("/lex".into())).unwrap();
        assert_eq!(m.lexicons.main.as_deref(), Some(Path::new("/lex/greek.txt")));
        let with_field = format!("lexicon_dir = \"dicts\"\n{TEXT}");
        let m = RunManifest::parse(&with_field, Path::new("/data/run.toml"), Some("/lex".into())).unwrap();
        assert_eq!(m.lexicons.main.as_deref(), Some(Path::new("/data/dicts/greek.txt")));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text =
            "output_dir = \"o\"\n[[commentary]]\nid = \"a\"\ngt = \"x\"\n[[commentary]]\nid = \"a\"\ngt = \"y\"\n";
        let e = RunManifest::parse(text, Path::new("m.toml"), None).unwrap_err();
        assert!(e.to_string().contains("duplicate commentary id"), "{e}");
    }

    #[test]
    fn empty_manifest() {
        let m = RunManifest::parse("output_dir = \"o\"\n", Path::new("m.toml"), None).unwrap();
        assert_eq!(m.check_paths().unwrap_err().to_string(), "no commentaries");
    }

    #[test]
    fn missing_paths_are_listed() {
        let m = RunManifest::parse(TEXT, Path::new("/nonexistent/run.toml"), None).unwrap();
        let e = m.check_paths().unwrap_err();
        assert!(e.to_string().contains("/nonexistent/a/gt"), "{e}");
    }
}
