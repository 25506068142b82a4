//! Statement-level bug localization from bug-report text.
//!
//! Every executable statement becomes a small structured document with four
//! token fields (the statement itself, its enclosing method name, enclosing
//! class names and adjacent comments). A bug report is a structured query
//! with a summary and a description. A statement's score is the weighted sum
//! of Okapi BM25 over every (query field, document field) pair.

pub mod corpus;
pub mod extract;
pub mod tokenize;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{
    build_corpus, CorpusOptions, CorpusWarning, DocField, FieldStats, StatementCorpus,
    StatementDocument, TermBag,
};
pub use extract::{JavaScanner, LineExtractor, RawStatement, StatementExtractor};
pub use tokenize::Tokenizer;

use crate::ranked::{RankedList, StatementId};

#[derive(Debug, Error)]
pub enum BluesError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid bug report: {0}")]
    InvalidReport(String),
    #[error("invalid retrieval config: {0}")]
    InvalidConfig(String),
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corpus cache: {0}")]
    Cache(serde_json::Error),
    #[error("unsupported corpus cache version {0}")]
    CacheVersion(u32),
}

/// The query side. Stored on disk as a JSON object with exactly the keys
/// `id`, `summary` and `description`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BugReport {
    pub id: String,
    pub summary: String,
    pub description: String,
}

impl BugReport {
    pub fn new(
        id: impl Into<String>,
        summary: impl Into<String>,
        description: impl Into<String>,
    ) -> Result<Self, BluesError> {
        let report = BugReport {
            id: id.into(),
            summary: summary.into(),
            description: description.into(),
        };
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<(), BluesError> {
        if self.id.trim().is_empty() {
            return Err(BluesError::InvalidReport("empty id".into()));
        }
        if self.summary.trim().is_empty() {
            return Err(BluesError::InvalidReport(format!(
                "report {} has an empty summary",
                self.id
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, BluesError> {
        let report: BugReport =
            serde_json::from_str(text).map_err(|e| BluesError::InvalidReport(e.to_string()))?;
        report.validate()?;
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self, BluesError> {
        let text = std::fs::read_to_string(path).map_err(|source| BluesError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        BugReport::from_json(&text)
    }

    pub fn field(&self, field: QueryField) -> &str {
        match field {
            QueryField::Summary => &self.summary,
            QueryField::Description => &self.description,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryField {
    Summary,
    Description,
}

impl QueryField {
    pub const ALL: [QueryField; 2] = [QueryField::Summary, QueryField::Description];

    pub fn name(self) -> &'static str {
        match self {
            QueryField::Summary => "summary",
            QueryField::Description => "description",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        QueryField::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalConfig {
    pub k1: f64,
    pub b: f64,
    /// Indexed `[query field][doc field]`.
    pub field_weights: [[f64; 4]; 2],
    /// Output cutoff; `None` keeps every statement.
    pub k: Option<usize>,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            k1: 1.2,
            b: 0.75,
            field_weights: [[1.0; 4]; 2],
            k: None,
        }
    }
}

impl RetrievalConfig {
    pub fn weight(&self, query: QueryField, doc: DocField) -> f64 {
        self.field_weights[query as usize][doc.index()]
    }

    pub fn set_weight(&mut self, query: QueryField, doc: DocField, weight: f64) {
        self.field_weights[query as usize][doc.index()] = weight;
    }

    pub fn validate(&self) -> Result<(), BluesError> {
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(BluesError::InvalidConfig(format!(
                "k1 must be >= 0, got {}",
                self.k1
            )));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(BluesError::InvalidConfig(format!(
                "b must be in [0, 1], got {}",
                self.b
            )));
        }
        for q in QueryField::ALL {
            for d in DocField::ALL {
                let w = self.weight(q, d);
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(BluesError::InvalidConfig(format!(
                        "weight {}.{} must be >= 0, got {w}",
                        q.name(),
                        d.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Okapi BM25 of `query` against one document field.
///
/// `idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))` and the term-frequency part
/// is `(k1 + 1) tf / (tf + k1 (1 - b + b len / avglen))`. Repeated query tokens
/// contribute once per occurrence.
pub fn bm25(stats: &FieldStats, query: &[String], field: &TermBag, k1: f64, b: f64) -> f64 {
    let avg_len = stats.avg_len();
    if avg_len <= 0.0 {
        return 0.0;
    }
    let n = stats.num_docs as f64;
    let len_norm = 1.0 - b + b * field.len() as f64 / avg_len;
    let mut score = 0.0;
    for term in query {
        let tf = f64::from(field.count(term));
        if tf == 0.0 {
            continue;
        }
        let df = f64::from(stats.df(term));
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        score += idf * (k1 + 1.0) * tf / (tf + k1 * len_norm);
    }
    score
}

/// Scores one document against pre-tokenized query fields.
pub fn score_document(
    corpus: &StatementCorpus,
    doc: &StatementDocument,
    query: &[Vec<String>; 2],
    config: &RetrievalConfig,
) -> f64 {
    let empty = TermBag::default();
    let mut total = 0.0;
    for q in QueryField::ALL {
        let tokens = &query[q as usize];
        if tokens.is_empty() {
            continue;
        }
        for d in DocField::ALL {
            let w = config.weight(q, d);
            if w == 0.0 {
                continue;
            }
            let field = doc.field(d).unwrap_or(&empty);
            total += w * bm25(corpus.stats(d), tokens, field, config.k1, config.b);
        }
    }
    total
}

/// Ranks every statement of `corpus` against `report`.
pub fn rank_statements(
    corpus: &StatementCorpus,
    report: &BugReport,
    config: &RetrievalConfig,
    tokenizer: &Tokenizer,
) -> Result<RankedList, BluesError> {
    if corpus.is_empty() {
        return Err(BluesError::EmptyCorpus);
    }
    config.validate()?;
    report.validate()?;
    let query = [
        tokenizer.tokenize(report.field(QueryField::Summary)),
        tokenizer.tokenize(report.field(QueryField::Description)),
    ];
    let scores: Vec<(StatementId, f64)> = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            (
                doc.statement.clone(),
                score_document(corpus, doc, &query, config),
            )
        })
        .collect();
    let k = config.k.unwrap_or(scores.len());
    Ok(RankedList::from_scores(scores, k).expect("corpus statement ids are unique"))
}
