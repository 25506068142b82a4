//! Ranked lists of statements, the common currency between localization
//! techniques, the aggregator and the evaluation harness.
//!
//! On disk a ranked list is a CSV file with the header `rank,statement,score`
//! and scores printed with six decimal places. Statement ids that contain
//! commas (method signatures usually do) are quoted.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque statement identifier, conventionally `FQClassName#methodSignature#line`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatementId(String);

impl StatementId {
    pub fn new(id: impl Into<String>) -> Self {
        StatementId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StatementId {
    fn from(s: &str) -> Self {
        StatementId(s.to_string())
    }
}

impl From<String> for StatementId {
    fn from(s: String) -> Self {
        StatementId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub statement: StatementId,
    pub score: f64,
}

#[derive(Debug, Error)]
pub enum RankedListError {
    #[error("score for {0} is not a finite number")]
    NonFiniteScore(StatementId),
    #[error("duplicate statement id {0}")]
    DuplicateStatement(StatementId),
    #[error("list has {len} entries but cutoff k is {k}")]
    TooLong { len: usize, k: usize },
    #[error("line {line}: expected rank {expected}, found {found}")]
    RankGap {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: score {score} is higher than the score of the entry above it")]
    IncreasingScore { line: usize, score: f64 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("expected header \"rank,statement,score\"")]
    BadHeader,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An ordered top-k list.
///
/// Ranks are consecutive from 1, scores never increase down the list and
/// statement ids are unique. Lists built with [`RankedList::from_scores`]
/// additionally order equal scores by ascending statement id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
    k: usize,
}

impl RankedList {
    /// Sorts `scores` descending (ties by id ascending), assigns consecutive
    /// ranks and keeps the first `k`.
    pub fn from_scores(
        scores: impl IntoIterator<Item = (StatementId, f64)>,
        k: usize,
    ) -> Result<Self, RankedListError> {
        let mut scored: Vec<(StatementId, f64)> = scores.into_iter().collect();
        let mut seen = HashSet::with_capacity(scored.len());
        for (id, score) in &scored {
            if !score.is_finite() {
                return Err(RankedListError::NonFiniteScore(id.clone()));
            }
            if !seen.insert(id) {
                return Err(RankedListError::DuplicateStatement(id.clone()));
            }
        }
        scored.sort_by(descending_score_then_id);
        scored.truncate(k);
        let entries = scored
            .into_iter()
            .enumerate()
            .map(|(i, (statement, score))| RankedEntry {
                rank: i + 1,
                statement,
                score,
            })
            .collect();
        Ok(RankedList { entries, k })
    }

    /// Builds a list that keeps the given order, e.g. the output of an
    /// aggregation or a list read back from disk. Scores must be
    /// non-increasing.
    pub fn from_ordered(
        ordered: impl IntoIterator<Item = (StatementId, f64)>,
        k: usize,
    ) -> Result<Self, RankedListError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, (statement, score)) in ordered.into_iter().enumerate() {
            if !score.is_finite() {
                return Err(RankedListError::NonFiniteScore(statement));
            }
            if let Some(prev) = entries.last().map(|e: &RankedEntry| e.score) {
                if score > prev {
                    return Err(RankedListError::IncreasingScore { line: i + 1, score });
                }
            }
            if !seen.insert(statement.clone()) {
                return Err(RankedListError::DuplicateStatement(statement));
            }
            entries.push(RankedEntry {
                rank: i + 1,
                statement,
                score,
            });
        }
        if entries.len() > k {
            return Err(RankedListError::TooLong {
                len: entries.len(),
                k,
            });
        }
        Ok(RankedList { entries, k })
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn statements(&self) -> impl Iterator<Item = &StatementId> + '_ {
        self.entries.iter().map(|e| &e.statement)
    }

    /// 1-based rank of `statement`, if present.
    pub fn rank_of(&self, statement: &StatementId) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| &e.statement == statement)
            .map(|e| e.rank)
    }

    /// Keeps the first `k` entries and lowers the cutoff to `k`.
    pub fn truncated(&self, k: usize) -> RankedList {
        RankedList {
            entries: self.entries.iter().take(k).cloned().collect(),
            k: k.min(self.k),
        }
    }

    /// Same entries under a different cutoff.
    pub fn with_k(mut self, k: usize) -> Result<Self, RankedListError> {
        if self.entries.len() > k {
            return Err(RankedListError::TooLong {
                len: self.entries.len(),
                k,
            });
        }
        self.k = k;
        Ok(self)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), RankedListError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["rank", "statement", "score"])?;
        for e in &self.entries {
            writer.write_record([
                e.rank.to_string(),
                e.statement.to_string(),
                format!("{:.6}", e.score),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads a ranked-list CSV. The cutoff of the returned list is its length.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, RankedListError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = reader.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["rank", "statement", "score"] {
            return Err(RankedListError::BadHeader);
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            // header is line 1
            let line = i + 2;
            let record = record?;
            if record.len() != 3 {
                return Err(RankedListError::Malformed {
                    line,
                    message: format!("expected 3 fields, found {}", record.len()),
                });
            }
            let rank: usize = record[0].parse().map_err(|_| RankedListError::Malformed {
                line,
                message: format!("invalid rank {:?}", &record[0]),
            })?;
            if rank != rows.len() + 1 {
                return Err(RankedListError::RankGap {
                    line,
                    expected: rows.len() + 1,
                    found: rank,
                });
            }
            let score: f64 = record[2].parse().map_err(|_| RankedListError::Malformed {
                line,
                message: format!("invalid score {:?}", &record[2]),
            })?;
            if record[1].is_empty() {
                return Err(RankedListError::Malformed {
                    line,
                    message: "empty statement id".to_string(),
                });
            }
            rows.push((StatementId::new(&record[1]), score));
        }
        let len = rows.len();
        RankedList::from_ordered(rows, len).map_err(|e| match e {
            RankedListError::IncreasingScore { line, score } => RankedListError::IncreasingScore {
                line: line + 1,
                score,
            },
            other => other,
        })
    }
}

fn descending_score_then_id(a: &(StatementId, f64), b: &(StatementId, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}
