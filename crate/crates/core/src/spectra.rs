//! Coverage spectra and Ochiai suspiciousness.
//!
//! A spectrum is read from two text files: a matrix with one line per test
//! (whitespace separated `0`/`1` coverage bits followed by `+` for a passing
//! or `-` for a failing test) and a statement list with one identifier per
//! line, in column order.

use std::collections::HashSet;

use thiserror::Error;

use crate::ranked::{RankedList, StatementId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("row {row}: expected {expected} coverage bits, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: invalid token {token:?} (expected 0, 1, + or -)")]
    InvalidToken { row: usize, token: String },
    #[error("row {row}: missing outcome token (+ or -)")]
    MissingOutcome { row: usize },
    #[error("spectra line {line}: duplicate statement id {id}")]
    DuplicateStatement { line: usize, id: String },
    #[error("no failing test")]
    NoFailingTest,
    #[error("unknown statement id {0}")]
    UnknownStatement(String),
}

/// Per-test coverage over an ordered set of statements.
#[derive(Debug, Clone)]
pub struct CoverageSpectrum {
    statements: Vec<StatementId>,
    rows: Vec<Vec<bool>>,
    outcomes: Vec<Outcome>,
}

impl CoverageSpectrum {
    /// Validates and assembles a spectrum. `rows[t][s]` is true when test `t`
    /// executes statement `s`.
    pub fn new(
        statements: Vec<StatementId>,
        rows: Vec<Vec<bool>>,
        outcomes: Vec<Outcome>,
    ) -> Result<Self, SpectrumError> {
        let mut seen = HashSet::with_capacity(statements.len());
        for (i, s) in statements.iter().enumerate() {
            if !seen.insert(s) {
                return Err(SpectrumError::DuplicateStatement {
                    line: i + 1,
                    id: s.to_string(),
                });
            }
        }
        assert_eq!(rows.len(), outcomes.len(), "one outcome per coverage row");
        for (i, row) in rows.iter().enumerate() {
            if row.len() != statements.len() {
                return Err(SpectrumError::RowLength {
                    row: i + 1,
                    expected: statements.len(),
                    found: row.len(),
                });
            }
        }
        if !outcomes.contains(&Outcome::Fail) {
            return Err(SpectrumError::NoFailingTest);
        }
        Ok(CoverageSpectrum {
            statements,
            rows,
            outcomes,
        })
    }

    pub fn statements(&self) -> &[StatementId] {
        &self.statements
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn num_tests(&self) -> usize {
        self.rows.len()
    }

    pub fn num_failing(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| **o == Outcome::Fail)
            .count()
    }

    fn tally_column(&self, column: usize) -> Tally {
        let mut t = Tally::default();
        for (row, outcome) in self.rows.iter().zip(&self.outcomes) {
            match (row[column], outcome) {
                (true, Outcome::Fail) => t.ef += 1,
                (true, Outcome::Pass) => t.ep += 1,
                (false, Outcome::Fail) => t.nf += 1,
                (false, Outcome::Pass) => t.np += 1,
            }
        }
        t
    }
}

/// Parses a coverage matrix and its statement list.
pub fn parse_spectrum(
    matrix_text: &str,
    spectra_text: &str,
) -> Result<CoverageSpectrum, SpectrumError> {
    let statements: Vec<StatementId> = spectra_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(StatementId::from)
        .collect();
    let width = statements.len();

    let mut seen = HashSet::with_capacity(width);
    for (i, line) in spectra_text.lines().enumerate() {
        let line_id = line.trim();
        if !line_id.is_empty() && !seen.insert(line_id) {
            return Err(SpectrumError::DuplicateStatement {
                line: i + 1,
                id: line_id.to_string(),
            });
        }
    }

    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for (i, line) in matrix_text.lines().enumerate() {
        let row_no = i + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((last, bits)) = tokens.split_last() else {
            continue;
        };
        let outcome = match *last {
            "+" => Outcome::Pass,
            "-" => Outcome::Fail,
            "0" | "1" => return Err(SpectrumError::MissingOutcome { row: row_no }),
            other => {
                return Err(SpectrumError::InvalidToken {
                    row: row_no,
                    token: other.to_string(),
                })
            }
        };
        let mut row = Vec::with_capacity(bits.len());
        for tok in bits {
            match *tok {
                "0" => row.push(false),
                "1" => row.push(true),
                other => {
                    return Err(SpectrumError::InvalidToken {
                        row: row_no,
                        token: other.to_string(),
                    })
                }
            }
        }
        if row.len() != width {
            return Err(SpectrumError::RowLength {
                row: row_no,
                expected: width,
                found: row.len(),
            });
        }
        rows.push(row);
        outcomes.push(outcome);
    }
    CoverageSpectrum::new(statements, rows, outcomes)
}

/// The four spectrum counts for one statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    /// failing tests executing the statement
    pub ef: usize,
    /// passing tests executing the statement
    pub ep: usize,
    /// failing tests not executing the statement
    pub nf: usize,
    /// passing tests not executing the statement
    pub np: usize,
}

impl Tally {
    /// `ef / sqrt((ef + nf) * (ef + ep))`, and 0 for statements no failing
    /// test executes.
    pub fn ochiai(&self) -> f64 {
        if self.ef == 0 {
            return 0.0;
        }
        let ef = self.ef as f64;
        ef / (((self.ef + self.nf) as f64) * ((self.ef + self.ep) as f64)).sqrt()
    }
}

pub fn tally(spectrum: &CoverageSpectrum, statement: &StatementId) -> Result<Tally, SpectrumError> {
    let column = spectrum
        .statements
        .iter()
        .position(|s| s == statement)
        .ok_or_else(|| SpectrumError::UnknownStatement(statement.to_string()))?;
    Ok(spectrum.tally_column(column))
}

/// Scores every statement with Ochiai and ranks them. `k` defaults to the
/// number of statements.
pub fn ochiai(spectrum: &CoverageSpectrum, k: Option<usize>) -> RankedList {
    let k = k.unwrap_or(spectrum.statements.len());
    let scores = spectrum
        .statements
        .iter()
        .enumerate()
        .map(|(col, id)| (id.clone(), spectrum.tally_column(col).ochiai()));
    RankedList::from_scores(scores, k).expect("spectrum ids are unique and scores finite")
}
