//! Text cleaning: tokenization, stopword filtering and stemming.
//!
//! The pipeline is `tokenize -> drop stopwords -> stem -> keyword
//! equivalence`, and it keeps token order, because the HAL window depends
//! on positions.

pub mod porter;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub use porter::stem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Hate,
    Nohate,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Hate => "hate",
            Label::Nohate => "nohate",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hate" => Ok(Label::Hate),
            "nohate" => Ok(Label::Nohate),
            other => Err(Error::InvalidConfig(format!(
                "unknown label `{other}` (expected hate or nohate)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub label: Label,
    pub text: String,
}

/// Lowercase alphanumeric tokens in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

/// The stems of one document, one per surviving token, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StemSeq(Vec<String>);

impl StemSeq {
    pub fn new(stems: Vec<String>) -> Self {
        StemSeq(stems)
    }

    pub fn stems(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, stem: &str) -> bool {
        self.0.iter().any(|s| s == stem)
    }

    /// Distinct stems in lexicographic order.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.0.iter().map(String::as_str).collect()
    }
}

impl<S: Into<String>> FromIterator<S> for StemSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StemSeq(iter.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum StemmerKind {
    #[default]
    Porter,
    None,
}

impl FromStr for StemmerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "porter" => Ok(StemmerKind::Porter),
            "none" => Ok(StemmerKind::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown stemmer `{other}` (expected porter or none)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub stemmer: StemmerKind,
    pub stopword_removal: bool,
    pub stopword_lexicon: BTreeSet<String>,
    /// Applied after stemming, e.g. `woman -> women`.
    pub keyword_equivalence: BTreeMap<String, String>,
}

impl PreprocessConfig {
    pub fn with_stopwords(lexicon: BTreeSet<String>) -> Self {
        PreprocessConfig {
            stopword_removal: true,
            stopword_lexicon: lexicon,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stopword_removal && self.stopword_lexicon.is_empty() {
            return Err(Error::InvalidConfig(
                "stopword removal is on but the lexicon is empty".into(),
            ));
        }
        Ok(())
    }

    /// Maps one token to its final stem: stemmer, then equivalence map.
    pub fn normalize_token(&self, token: &str) -> String {
        let stemmed = match self.stemmer {
            StemmerKind::Porter => porter::stem(token),
            StemmerKind::None => token.to_string(),
        };
        match self.keyword_equivalence.get(&stemmed) {
            Some(target) => target.clone(),
            None => stemmed,
        }
    }

    fn is_stopword(&self, token: &str) -> bool {
        self.stopword_removal && self.stopword_lexicon.contains(token)
    }
}

/// Splits on every non-alphanumeric code point after NFC normalization and
/// lowercases. Digit-only tokens are kept.
pub fn tokenize(text: &str) -> TokenSeq {
    let normalized: String = text.nfc().collect();
    TokenSeq(
        normalized
            .split(|c: char| !c.is_alphanumeric())
            .filter(|fragment| !fragment.is_empty())
            .map(str::to_lowercase)
            .collect(),
    )
}

pub fn preprocess(doc: &RawDocument, cfg: &PreprocessConfig) -> StemSeq {
    preprocess_text(&doc.text, cfg)
}

pub fn preprocess_text(text: &str, cfg: &PreprocessConfig) -> StemSeq {
    tokenize(text)
        .into_inner()
        .into_iter()
        .filter(|token| !cfg.is_stopword(token))
        .map(|token| cfg.normalize_token(&token))
        .collect()
}

/// One lowercase word per line; `#` starts a comment.
pub fn parse_stopwords(src: &str) -> BTreeSet<String> {
    src.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|word| !word.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let src = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_stopwords(&src))
}
