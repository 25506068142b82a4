//! Top-k accuracy of ranked lists against known buggy statements.
//!
//! A defect counts as localized at cutoff `k` when any of its ground-truth
//! statements is ranked at or above `k`. Statements match by exact id.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::ranked::{RankedList, StatementId};

pub const DEFAULT_CUTOFFS: [usize; 4] = [1, 25, 50, 100];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("defect {0} has no ground-truth entry")]
    MissingTruth(String),
    #[error("cutoffs must be positive")]
    BadCutoff,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("defect {0}: empty ground truth")]
    EmptyGroundTruth(String),
    #[error("defect {0} is listed more than once")]
    DuplicateDefect(String),
    #[error("defect {defect}: {field} file {path} does not exist")]
    MissingFile {
        defect: String,
        field: &'static str,
        path: PathBuf,
    },
    #[error("defect {0}: matrix and spectra must be given together")]
    IncompleteSpectrum(String),
    #[error("defect {0}: empty defect id")]
    EmptyDefectId(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffAccuracy {
    pub k: usize,
    pub localized: usize,
    pub total: usize,
}

impl CutoffAccuracy {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.localized as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// Ascending by `k`.
    pub cutoffs: Vec<CutoffAccuracy>,
    /// Best rank of any ground-truth statement; `None` when none is listed.
    pub best_ranks: BTreeMap<String, Option<usize>>,
}

impl AccuracyReport {
    pub fn at(&self, k: usize) -> Option<&CutoffAccuracy> {
        self.cutoffs.iter().find(|c| c.k == k)
    }

    /// Per-defect CSV: `defect_id,best_rank`, with `absent` for misses.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["defect_id", "best_rank"])?;
        for (defect, rank) in &self.best_ranks {
            let rank = rank.map_or_else(|| "absent".to_string(), |r| r.to_string());
            w.write_record([defect.as_str(), rank.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::from("cutoff  localized  total  fraction\n");
        for c in &self.cutoffs {
            let _ = writeln!(
                s,
                "top-{:<3} {:>9} {:>6} {:>9.4}",
                c.k,
                c.localized,
                c.total,
                c.fraction()
            );
        }
        s
    }
}

/// Computes acc@k for each cutoff over every defect in `lists`.
pub fn accuracy_at(
    lists: &BTreeMap<String, RankedList>,
    truth: &BTreeMap<String, BTreeSet<StatementId>>,
    cutoffs: &[usize],
) -> Result<AccuracyReport, EvalError> {
    if cutoffs.contains(&0) {
        return Err(EvalError::BadCutoff);
    }
    let mut ks: Vec<usize> = cutoffs.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let mut best_ranks = BTreeMap::new();
    for (defect, list) in lists {
        let gt = truth
            .get(defect)
            .ok_or_else(|| EvalError::MissingTruth(defect.clone()))?;
        let best = list
            .entries()
            .iter()
            .filter(|e| gt.contains(&e.statement))
            .map(|e| e.rank)
            .min();
        best_ranks.insert(defect.clone(), best);
    }
    let total = best_ranks.len();
    let cutoffs = ks
        .into_iter()
        .map(|k| CutoffAccuracy {
            k,
            localized: best_ranks
                .values()
                .filter(|r| r.is_some_and(|r| r <= k))
                .count(),
            total,
        })
        .collect();
    Ok(AccuracyReport {
        cutoffs,
        best_ranks,
    })
}

/// One defect in an evaluation manifest. Paths are absolute after loading.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRecord {
    pub defect_id: String,
    pub ground_truth: BTreeSet<StatementId>,
    #[serde(default)]
    pub matrix: Option<PathBuf>,
    #[serde(default)]
    pub spectra: Option<PathBuf>,
    #[serde(default)]
    pub bug_report: Option<PathBuf>,
    #[serde(default)]
    pub source_root: Option<PathBuf>,
    /// Precomputed ranked-list CSVs.
    #[serde(default)]
    pub ranked_lists: Vec<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    defects: Vec<DefectRecord>,
}

/// Loads a JSON manifest `{"defects": [...]}`, resolving relative paths
/// against the manifest's directory and checking that referenced files exist.
pub fn load_manifest(path: &Path) -> Result<Vec<DefectRecord>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| EvalError::Manifest {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(manifest.defects.len());
    for (i, mut rec) in manifest.defects.into_iter().enumerate() {
        if rec.defect_id.trim().is_empty() {
            return Err(EvalError::EmptyDefectId(i + 1));
        }
        if !seen.insert(rec.defect_id.clone()) {
            return Err(EvalError::DuplicateDefect(rec.defect_id));
        }
        if rec.ground_truth.is_empty() {
            return Err(EvalError::EmptyGroundTruth(rec.defect_id));
        }
        if rec.matrix.is_some() != rec.spectra.is_some() {
            return Err(EvalError::IncompleteSpectrum(rec.defect_id));
        }
        let id = rec.defect_id.clone();
        let check = |field: &'static str, p: &mut PathBuf| -> Result<(), EvalError> {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if p.exists() {
                Ok(())
            } else {
                Err(EvalError::MissingFile {
                    defect: id.clone(),
                    field,
                    path: p.clone(),
                })
            }
        };
        if let Some(p) = rec.matrix.as_mut() {
            check("matrix", p)?;
        }
        if let Some(p) = rec.spectra.as_mut() {
            check("spectra", p)?;
        }
        if let Some(p) = rec.bug_report.as_mut() {
            check("bug_report", p)?;
        }
        if let Some(p) = rec.source_root.as_mut() {
            check("source_root", p)?;
        }
        for p in rec.ranked_lists.iter_mut() {
            check("ranked_lists", p)?;
        }
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranked(ids: &[&str]) -> RankedList {
        RankedList::from_scores(
            ids.iter()
                .enumerate()
                .map(|(i, s)| (StatementId::from(*s), 1.0 / (i + 1) as f64)),
            ids.len(),
        )
        .unwrap()
    }

    /// list of `len` filler statements with `target` at `rank`
    fn with_target_at(rank: usize, len: usize) -> RankedList {
        let ids: Vec<String> = (1..=len)
            .map(|r| {
                if r == rank {
                    "bug".to_string()
                } else {
                    format!("s{r:04}")
                }
            })
            .collect();
        RankedList::from_ordered(
            ids.into_iter()
                .enumerate()
                .map(|(i, s)| (StatementId::new(s), (len - i) as f64)),
            len,
        )
        .unwrap()
    }

    fn truth_of(pairs: &[(&str, &[&str])]) -> BTreeMap<String, BTreeSet<StatementId>> {
        pairs
            .iter()
            .map(|(d, ids)| {
                (
                    d.to_string(),
                    ids.iter().map(|s| StatementId::from(*s)).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn top_one_hit() {
        let lists = BTreeMap::from([("d1".to_string(), ranked(&["s", "t"]))]);
        let report = accuracy_at(&lists, &truth_of(&[("d1", &["s"])]), &DEFAULT_CUTOFFS).unwrap();
        assert_eq!(report.at(1).unwrap().localized, 1);
        assert_eq!(report.at(1).unwrap().fraction(), 1.0);
    }

    #[test]
    fn absent_truth_counts_nowhere() {
        let lists = BTreeMap::from([("d1".to_string(), ranked(&["a", "b"]))]);
        let report = accuracy_at(&lists, &truth_of(&[("d1", &["s"])]), &DEFAULT_CUTOFFS).unwrap();
        assert!(report.cutoffs.iter().all(|c| c.localized == 0));
        assert_eq!(report.best_ranks["d1"], None);
    }

    #[test]
    fn three_defects() {
        let lists = BTreeMap::from([
            ("a".to_string(), with_target_at(1, 150)),
            ("b".to_string(), with_target_at(30, 150)),
            ("c".to_string(), with_target_at(120, 150)),
        ]);
        let truth = truth_of(&[("a", &["bug"]), ("b", &["bug"]), ("c", &["bug"])]);
        let report = accuracy_at(&lists, &truth, &DEFAULT_CUTOFFS).unwrap();
        let counts: Vec<_> = report.cutoffs.iter().map(|c| (c.k, c.localized)).collect();
        assert_eq!(counts, [(1, 1), (25, 1), (50, 2), (100, 2)]);
        assert!(report.cutoffs.iter().all(|c| c.total == 3));
    }

    #[test]
    fn best_of_several_truth_statements() {
        let lists = BTreeMap::from([("d".to_string(), ranked(&["a", "b", "c", "d"]))]);
        let report = accuracy_at(&lists, &truth_of(&[("d", &["d", "b"])]), &[1, 2]).unwrap();
        assert_eq!(report.best_ranks["d"], Some(2));
        assert_eq!(report.at(2).unwrap().localized, 1);
    }

    #[test]
    fn missing_truth_and_bad_cutoff() {
        let lists = BTreeMap::from([("d".to_string(), ranked(&["a"]))]);
        assert!(matches!(
            accuracy_at(&lists, &BTreeMap::new(), &[1]),
            Err(EvalError::MissingTruth(d)) if d == "d"
        ));
        assert!(matches!(
            accuracy_at(&lists, &truth_of(&[("d", &["a"])]), &[0]),
            Err(EvalError::BadCutoff)
        ));
    }

    #[test]
    fn csv_and_table() {
        let lists = BTreeMap::from([
            ("x".to_string(), ranked(&["a", "b"])),
            ("y".to_string(), ranked(&["c"])),
        ]);
        let report =
            accuracy_at(&lists, &truth_of(&[("x", &["b"]), ("y", &["q"])]), &[1, 25]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "defect_id,best_rank\nx,2\ny,absent\n"
        );
        let table = report.summary_table();
        assert!(table.contains("top-25"));
        assert!(table.lines().nth(2).unwrap().contains("0.5000"));
    }

    fn manifest(dir: &Path, body: &str) -> PathBuf {
        let p = dir.join("manifest.json");
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn manifest_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("l.csv"), "rank,statement,score\n").unwrap();
        let p = manifest(
            dir.path(),
            r#"{"defects":[{"defect_id":"D-1","ground_truth":["A#f()#3"],"ranked_lists":["l.csv"]}]}"#,
        );
        let recs = load_manifest(&p).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].ranked_lists[0], dir.path().join("l.csv"));
    }

    #[test]
    fn manifest_validation() {
        let dir = tempfile::tempdir().unwrap();
        let p = manifest(
            dir.path(),
            r#"{"defects":[{"defect_id":"D-9","ground_truth":[]}]}"#,
        );
        let err = load_manifest(&p).unwrap_err();
        assert!(matches!(&err, EvalError::EmptyGroundTruth(d) if d == "D-9"));
        assert!(err.to_string().contains("D-9"));

        let p = manifest(
            dir.path(),
            r#"{"defects":[{"defect_id":"D","ground_truth":["a"]},{"defect_id":"D","ground_truth":["b"]}]}"#,
        );
        assert!(matches!(
            load_manifest(&p),
            Err(EvalError::DuplicateDefect(_))
        ));

        let p = manifest(
            dir.path(),
            r#"{"defects":[{"defect_id":"D","ground_truth":["a"],"bug_report":"nope.json"}]}"#,
        );
        assert!(matches!(
            load_manifest(&p),
            Err(EvalError::MissingFile {
                field: "bug_report",
                ..
            })
        ));

        let p = manifest(
            dir.path(),
            r#"{"defects":[{"defect_id":"D","ground_truth":["a"],"matrix":"manifest.json"}]}"#,
        );
        assert!(matches!(
            load_manifest(&p),
            Err(EvalError::IncompleteSpectrum(_))
        ));

        assert!(matches!(
            load_manifest(&dir.path().join("absent.json")),
            Err(EvalError::Io { .. })
        ));
    }
}
