#![allow(dead_code)]

use std::path::{Path, PathBuf};

use commentary_ocr_cli::RunManifest;

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// A scratch copy of the demo corpus, without previous outputs.
pub fn demo_copy() -> tempfile::TempDir {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["jebb_demo", "wecklein_demo", "lexicons"] {
        copy_tree(&demo_dir().join(name), &tmp.path().join(name));
    }
    for name in ["manifest.toml", "pipeline.toml"] {
        std::fs::copy(demo_dir().join(name), tmp.path().join(name)).unwrap();
    }
    tmp
}

pub fn manifest(dir: &Path) -> RunManifest {
    RunManifest::load(&dir.join("manifest.toml")).unwrap()
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(demo_dir().join("golden").join(name)).unwrap()
}
