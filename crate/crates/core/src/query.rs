//! Conjunctive keyword queries such as `white*women-black`.
//!
//! ```text
//! query := term (('*' | '-') term)*
//! ```
//!
//! `*` requires a term, `-` forbids it. There is no grouping and no OR.
//! Terms are stemmed with the active preprocessing config, so matching is on
//! stems rather than surface forms.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::preprocess::{preprocess, PreprocessConfig, RawDocument, StemSeq};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAst {
    positives: BTreeSet<String>,
    negatives: BTreeSet<String>,
}

impl QueryAst {
    pub fn new(positives: BTreeSet<String>, negatives: BTreeSet<String>) -> Result<Self> {
        if positives.is_empty() {
            return Err(Error::QueryParse {
                position: 0,
                message: "query needs at least one required term".into(),
            });
        }
        if let Some(both) = positives.intersection(&negatives).next() {
            return Err(Error::QueryParse {
                position: 0,
                message: format!("`{both}` is both required and excluded"),
            });
        }
        Ok(QueryAst {
            positives,
            negatives,
        })
    }

    pub fn positives(&self) -> &BTreeSet<String> {
        &self.positives
    }

    pub fn negatives(&self) -> &BTreeSet<String> {
        &self.negatives
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<&str> = self.positives.iter().map(String::as_str).collect();
        f.write_str(&pos.join("*"))?;
        for neg in &self.negatives {
            write!(f, "-{neg}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Required,
    Excluded,
}

/// Positions in errors are character offsets into `src`.
pub fn parse_query(src: &str, cfg: &PreprocessConfig) -> Result<QueryAst> {
    let err = |position: usize, message: String| Error::QueryParse { position, message };
    if src.trim().is_empty() {
        return Err(err(0, "empty query".into()));
    }

    let mut positives = BTreeSet::new();
    let mut negatives = BTreeSet::new();
    let mut polarity = Polarity::Required;
    let mut chars = src.char_indices().enumerate().peekable();
    let mut expect_term = true;
    let mut last_op_pos = 0;

    while let Some(&(pos, (_, c))) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if expect_term {
            if !c.is_alphanumeric() {
                return Err(err(pos, format!("expected a term, found `{c}`")));
            }
            let mut word = String::new();
            while let Some(&(_, (_, c))) = chars.peek() {
                if !c.is_alphanumeric() {
                    break;
                }
                word.push(c);
                chars.next();
            }
            let stem = cfg.normalize_token(&word.to_lowercase());
            let (same, other) = match polarity {
                Polarity::Required => (&mut positives, &negatives),
                Polarity::Excluded => (&mut negatives, &positives),
            };
            if other.contains(&stem) {
                return Err(err(pos, format!("`{word}` is both required and excluded")));
            }
            same.insert(stem);
            expect_term = false;
        } else {
            polarity = match c {
                '*' => Polarity::Required,
                '-' => Polarity::Excluded,
                other => return Err(err(pos, format!("expected `*` or `-`, found `{other}`"))),
            };
            last_op_pos = pos;
            chars.next();
            expect_term = true;
        }
    }
    if expect_term {
        return Err(err(last_op_pos, "dangling operator".into()));
    }
    QueryAst::new(positives, negatives)
}

/// Every required stem occurs and no excluded stem does.
pub fn eval_query(q: &QueryAst, stems: &StemSeq) -> bool {
    let present = stems.vocabulary();
    q.positives.iter().all(|p| present.contains(p.as_str()))
        && !q.negatives.iter().any(|n| present.contains(n.as_str()))
}

/// Stable filter of `corpus` by `q`.
pub fn select_subcorpus(
    corpus: &[RawDocument],
    q: &QueryAst,
    cfg: &PreprocessConfig,
) -> Vec<RawDocument> {
    corpus
        .iter()
        .filter(|doc| eval_query(q, &preprocess(doc, cfg)))
        .cloned()
        .collect()
}
