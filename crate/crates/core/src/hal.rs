//! Hyperspace Analogue to Language matrices.
//!
//! A window of `W` stems slides over the document. Every stem co-occurs with
//! the stem `d` positions before it (`0 <= d <= W-2`) with weight `W-1-d`.
//! The `d = 0` term is the stem paired with itself. Rows hold the later stem
//! and columns the earlier one. Counts are raw integers and repeated stems
//! accumulate.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::preprocess::StemSeq;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalMatrix {
    doc_id: Option<String>,
    vocab: Vec<String>,
    window: usize,
    cells: Vec<u64>,
}

pub fn build_matrix(stems: &StemSeq, window: usize) -> Result<HalMatrix> {
    if window < 2 {
        return Err(Error::InvalidWindow(window));
    }
    let mut vocab: Vec<String> = stems.vocabulary().into_iter().map(str::to_string).collect();
    vocab.sort();
    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let positions: Vec<usize> = stems.stems().iter().map(|s| index[s.as_str()]).collect();

    let k = vocab.len();
    let mut cells = vec![0u64; k * k];
    for (i, &later) in positions.iter().enumerate() {
        for d in 0..=i.min(window - 2) {
            let earlier = positions[i - d];
            cells[later * k + earlier] += (window - 1 - d) as u64;
        }
    }
    Ok(HalMatrix {
        doc_id: None,
        vocab,
        window,
        cells,
    })
}

impl HalMatrix {
    /// Tags the matrix with the document it came from, for error messages.
    pub fn with_doc_id(mut self, id: impl Into<String>) -> Self {
        self.doc_id = Some(id.into());
        self
    }

    pub fn doc_id(&self) -> Option<&str> {
        self.doc_id.as_deref()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Vocabulary size `k`.
    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn index_of(&self, stem: &str) -> Option<usize> {
        self.vocab.binary_search_by(|s| s.as_str().cmp(stem)).ok()
    }

    pub fn at(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.dim() + col]
    }

    /// Cell for `later` following `earlier`, if both are in the vocabulary.
    pub fn get(&self, later: &str, earlier: &str) -> Option<u64> {
        Some(self.at(self.index_of(later)?, self.index_of(earlier)?))
    }

    pub fn row(&self, i: usize) -> &[u64] {
        let k = self.dim();
        &self.cells[i * k..(i + 1) * k]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = u64> + '_ {
        (0..self.dim()).map(move |i| self.at(i, j))
    }

    pub fn total_mass(&self) -> u64 {
        self.cells.iter().sum()
    }

    fn absent(&self, stem: &str) -> Error {
        Error::KeywordAbsent {
            stem: stem.to_string(),
            doc: self.doc_id.clone().unwrap_or_else(|| "<unnamed>".into()),
        }
    }

    /// CSV with the vocabulary as header row and first column.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(sink);
        out.write_record(std::iter::once("").chain(self.vocab.iter().map(String::as_str)))?;
        for (i, stem) in self.vocab.iter().enumerate() {
            let mut record = Vec::with_capacity(self.dim() + 1);
            record.push(stem.clone());
            record.extend(self.row(i).iter().map(u64::to_string));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// A stem's row followed by its column, length `2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVector {
    pub stem: String,
    pub values: Vec<f64>,
}

impl AsRef<[f64]> for WordVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Sum of every word vector of the document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentVector {
    pub values: Vec<f64>,
}

impl AsRef<[f64]> for DocumentVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub fn word_vector(m: &HalMatrix, stem: &str) -> Result<WordVector> {
    let i = m.index_of(stem).ok_or_else(|| m.absent(stem))?;
    let values = m
        .row(i)
        .iter()
        .copied()
        .chain(m.column(i))
        .map(|c| c as f64)
        .collect();
    Ok(WordVector {
        stem: stem.to_string(),
        values,
    })
}

/// First half holds the column sums, second half the row sums.
pub fn document_vector(m: &HalMatrix) -> Result<DocumentVector> {
    if m.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let k = m.dim();
    let mut values = vec![0.0; 2 * k];
    for i in 0..k {
        for (j, &c) in m.row(i).iter().enumerate() {
            values[j] += c as f64;
            values[k + i] += c as f64;
        }
    }
    Ok(DocumentVector { values })
}
