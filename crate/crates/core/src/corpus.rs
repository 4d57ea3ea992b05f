//! JSON-Lines corpus input and the bundled sample corpus.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::RawDocument;

/// The 22 labelled comments used throughout the project, one JSON object per
/// line.
pub const BUNDLED_JSONL: &str = include_str!("../../../corpus/ohi-sample.jsonl");

pub fn bundled() -> Vec<RawDocument> {
    parse_jsonl(BUNDLED_JSONL.as_bytes(), "<bundled>").expect("bundled corpus is well formed")
}

/// Blank lines are skipped. Ids must be nonempty and unique.
pub fn parse_jsonl<R: BufRead>(reader: R, origin: &str) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let corpus_err = |message: String| Error::Corpus {
            path: origin.to_string(),
            line: idx + 1,
            message,
        };
        let line = line.map_err(|e| corpus_err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: RawDocument =
            serde_json::from_str(&line).map_err(|e| corpus_err(e.to_string()))?;
        if doc.id.is_empty() {
            return Err(corpus_err("empty document id".into()));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(corpus_err(format!("duplicate document id `{}`", doc.id)));
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn load_jsonl(path: &Path) -> Result<Vec<RawDocument>> {
    let file = std::fs::File::open(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_jsonl(std::io::BufReader::new(file), &path.display().to_string())
}

pub fn find<'a>(corpus: &'a [RawDocument], id: &str) -> Result<&'a RawDocument> {
    corpus
        .iter()
        .find(|doc| doc.id == id)
        .ok_or_else(|| Error::NotFound(id.to_string()))
}
