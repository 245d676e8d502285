#![allow(dead_code)]

use std::path::PathBuf;

use serde::Deserialize;
use spacelike::specfile::SurfaceSpec;

#[derive(Deserialize)]
struct Entry {
    file: String,
    c: f64,
}

pub struct CorpusPatch {
    pub name: String,
    pub spec: SurfaceSpec,
    pub c: f64,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus() -> Vec<CorpusPatch> {
    let dir = corpus_dir();
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).expect("manifest");
    let entries: Vec<Entry> = serde_json::from_str(&manifest).expect("manifest parses");
    entries
        .into_iter()
        .map(|e| {
            let text = std::fs::read_to_string(dir.join(&e.file)).expect("corpus file");
            CorpusPatch { spec: SurfaceSpec::parse(&text).expect("corpus spec parses"), name: e.file, c: e.c }
        })
        .collect()
}
