//! Rank aggregation of top-k lists.
//!
//! The aggregate is the length-k list minimizing the weighted sum of Spearman
//! footrule distances to the input lists, where an item missing from a top-k
//! list counts as ranked `k + 1`. [`ce_aggregate`] searches for it with the
//! cross-entropy method; [`brute_force_aggregate`] enumerates every
//! arrangement and is meant for small instances and tests.

mod brute;
mod ce;
mod footrule;

use std::collections::HashMap;

use thiserror::Error;

pub use brute::{arrangement_count, brute_force_aggregate, BRUTE_FORCE_LIMIT};
pub use ce::{ce_aggregate, CeConfig, CeOutcome};
pub use footrule::footrule;

use crate::ranked::{RankedList, StatementId};

#[derive(Debug, Error, PartialEq)]
pub enum RaflError {
    #[error("at least two ranked lists are required, got {0}")]
    TooFewLists(usize),
    #[error("expected {expected} weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight {index} is {value}; weights must be finite and non-negative")]
    BadWeight { index: usize, value: f64 },
    #[error("weights sum to zero")]
    ZeroWeights,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the {candidates} distinct candidate statements")]
    KExceedsCandidates { k: usize, candidates: usize },
    #[error("list has {len} entries, more than k = {k}")]
    ListLongerThanK { len: usize, k: usize },
    #[error("aggregate has {len} entries, expected {expected}")]
    AggregateLength { len: usize, expected: usize },
    #[error("statement {0} is not a candidate of this problem")]
    UnknownCandidate(StatementId),
    #[error("aggregate lists statement {0} twice")]
    RepeatedCandidate(StatementId),
    #[error("{arrangements} arrangements exceed the brute-force limit of {limit}")]
    TooLarge { arrangements: u128, limit: u128 },
    #[error("invalid cross-entropy config: {0}")]
    InvalidConfig(String),
}

/// Weighted footrule distance of an aggregate to the input lists.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FootruleObjective(pub f64);

impl FootruleObjective {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Input lists, their weights and the aggregate length.
///
/// Candidates are the union of the input statements, sorted by id; internally
/// they are referred to by their index in that order, so comparing index
/// sequences lexicographically compares id sequences lexicographically.
#[derive(Debug, Clone)]
pub struct AggregationProblem {
    lists: Vec<RankedList>,
    weights: Vec<f64>,
    k: usize,
    candidates: Vec<StatementId>,
    candidate_index: HashMap<StatementId, usize>,
    /// `ranks[list][candidate]`, `k + 1` when absent.
    ranks: Vec<Vec<u32>>,
}

impl AggregationProblem {
    /// Truncates every list to `k` and normalizes `weights` (uniform when
    /// `None`) to sum to one.
    pub fn new(
        lists: Vec<RankedList>,
        weights: Option<Vec<f64>>,
        k: usize,
    ) -> Result<Self, RaflError> {
        if lists.len() < 2 {
            return Err(RaflError::TooFewLists(lists.len()));
        }
        if k == 0 {
            return Err(RaflError::ZeroK);
        }
        let weights = match weights {
            None => vec![1.0; lists.len()],
            Some(w) if w.len() != lists.len() => {
                return Err(RaflError::WeightCount {
                    expected: lists.len(),
                    found: w.len(),
                })
            }
            Some(w) => w,
        };
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(RaflError::BadWeight { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(RaflError::ZeroWeights);
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let lists: Vec<RankedList> = lists
            .iter()
            .map(|l| l.truncated(k).with_k(k).expect("truncated to k"))
            .collect();
        let mut candidates: Vec<StatementId> =
            lists.iter().flat_map(|l| l.statements().cloned()).collect();
        candidates.sort();
        candidates.dedup();
        if k > candidates.len() {
            return Err(RaflError::KExceedsCandidates {
                k,
                candidates: candidates.len(),
            });
        }
        let candidate_index: HashMap<StatementId, usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let absent = (k + 1) as u32;
        let ranks = lists
            .iter()
            .map(|l| {
                let mut r = vec![absent; candidates.len()];
                for e in l.entries() {
                    r[candidate_index[&e.statement]] = e.rank as u32;
                }
                r
            })
            .collect();
        Ok(AggregationProblem {
            lists,
            weights,
            k,
            candidates,
            candidate_index,
            ranks,
        })
    }

    pub fn lists(&self) -> &[RankedList] {
        &self.lists
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn candidates(&self) -> &[StatementId] {
        &self.candidates
    }

    /// Weighted footrule objective of `aggregate`.
    pub fn objective(&self, aggregate: &RankedList) -> Result<FootruleObjective, RaflError> {
        if aggregate.len() != self.k {
            return Err(RaflError::AggregateLength {
                len: aggregate.len(),
                expected: self.k,
            });
        }
        let mut seen = vec![false; self.candidates.len()];
        let mut order = Vec::with_capacity(self.k);
        for id in aggregate.statements() {
            let &i = self
                .candidate_index
                .get(id)
                .ok_or_else(|| RaflError::UnknownCandidate(id.clone()))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(RaflError::RepeatedCandidate(id.clone()));
            }
            order.push(i as u32);
        }
        Ok(FootruleObjective(self.objective_of(&order)))
    }

    /// Objective of an arrangement given as candidate indices.
    pub(crate) fn objective_of(&self, order: &[u32]) -> f64 {
        let absent = (self.k + 1) as i64;
        let mut total = 0.0;
        for (ranks, &w) in self.ranks.iter().zip(&self.weights) {
            // distance when nothing is placed, corrected for placed items
            let mut d: i64 = ranks.iter().map(|&r| (absent - i64::from(r)).abs()).sum();
            for (pos, &c) in order.iter().enumerate() {
                let r = i64::from(ranks[c as usize]);
                d += (pos as i64 + 1 - r).abs() - (absent - r).abs();
            }
            total += w * d as f64;
        }
        total
    }

    /// Turns an arrangement of candidate indices into a ranked list with
    /// scores `k + 1 - position`.
    pub(crate) fn to_ranked(&self, order: &[u32]) -> RankedList {
        RankedList::from_ordered(
            order
                .iter()
                .enumerate()
                .map(|(pos, &c)| (self.candidates[c as usize].clone(), (self.k - pos) as f64)),
            self.k,
        )
        .expect("arrangements hold distinct candidates")
    }

    /// Candidates ordered by weighted positional score
    /// `sum_i w_i (k + 1 - rank_i)`, highest first, ties by id.
    pub(crate) fn consensus_order(&self) -> Vec<u32> {
        let absent = (self.k + 1) as f64;
        let mut scored: Vec<(f64, u32)> = (0..self.candidates.len())
            .map(|c| {
                let s = self
                    .ranks
                    .iter()
                    .zip(&self.weights)
                    .map(|(r, w)| w * (absent - f64::from(r[c])))
                    .sum();
                (s, c as u32)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.into_iter().map(|(_, c)| c).collect()
    }

    /// Input list `index` extended to length k with the highest-consensus
    /// candidates it does not already contain.
    pub fn padded_input(&self, index: usize) -> RankedList {
        self.to_ranked(&self.padded_input_order(index))
    }

    pub(crate) fn padded_input_order(&self, index: usize) -> Vec<u32> {
        let mut order: Vec<u32> = self.lists[index]
            .statements()
            .map(|id| self.candidate_index[id] as u32)
            .collect();
        let mut used = vec![false; self.candidates.len()];
        for &c in &order {
            used[c as usize] = true;
        }
        for c in self.consensus_order() {
            if order.len() == self.k {
                break;
            }
            if !used[c as usize] {
                order.push(c);
            }
        }
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn list(ids: &[&str]) -> RankedList {
        let n = ids.len();
        RankedList::from_ordered(
            ids.iter()
                .enumerate()
                .map(|(i, id)| (StatementId::from(*id), (n - i) as f64)),
            n,
        )
        .unwrap()
    }

    #[test]
    fn objective_of_identical_lists() {
        let p = AggregationProblem::new(
            vec![list(&["a", "b", "c"]), list(&["a", "b", "c"])],
            None,
            3,
        )
        .unwrap();
        assert_eq!(p.objective(&list(&["a", "b", "c"])).unwrap().value(), 0.0);
    }

    #[test]
    fn objective_of_swapped_pair() {
        let p =
            AggregationProblem::new(vec![list(&["x", "y"]), list(&["y", "x"])], None, 2).unwrap();
        assert_eq!(p.objective(&list(&["x", "y"])).unwrap().value(), 1.0);
    }

    #[test]
    fn degenerate_weights_select_one_list() {
        let l1 = list(&["x", "y", "z"]);
        let l2 = list(&["z", "w", "x"]);
        let p = AggregationProblem::new(vec![l1.clone(), l2], Some(vec![1.0, 0.0]), 3).unwrap();
        let agg = list(&["w", "x", "y"]);
        assert_eq!(
            p.objective(&agg).unwrap().value(),
            footrule(&agg, &l1, 3).unwrap()
        );
    }

    #[test]
    fn objective_matches_weighted_footrules() {
        let l1 = list(&["a", "b", "c", "d"]);
        let l2 = list(&["e", "a", "f"]);
        let l3 = list(&["c", "e"]);
        let p = AggregationProblem::new(
            vec![l1.clone(), l2.clone(), l3.clone()],
            Some(vec![2.0, 1.0, 1.0]),
            4,
        )
        .unwrap();
        let agg = list(&["e", "c", "a", "f"]);
        let expected = 0.5 * footrule(&agg, &l1, 4).unwrap()
            + 0.25 * footrule(&agg, &l2, 4).unwrap()
            + 0.25 * footrule(&agg, &l3, 4).unwrap();
        assert!((p.objective(&agg).unwrap().value() - expected).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let a = list(&["a", "b"]);
        assert_eq!(
            AggregationProblem::new(vec![a.clone()], None, 2).unwrap_err(),
            RaflError::TooFewLists(1)
        );
        assert_eq!(
            AggregationProblem::new(vec![a.clone(), a.clone()], None, 0).unwrap_err(),
            RaflError::ZeroK
        );
        assert_eq!(
            AggregationProblem::new(vec![a.clone(), a.clone()], None, 3).unwrap_err(),
            RaflError::KExceedsCandidates {
                k: 3,
                candidates: 2
            }
        );
        assert_eq!(
            AggregationProblem::new(vec![a.clone(), a.clone()], Some(vec![1.0]), 2).unwrap_err(),
            RaflError::WeightCount {
                expected: 2,
                found: 1
            }
        );
        assert_eq!(
            AggregationProblem::new(vec![a.clone(), a.clone()], Some(vec![0.0, 0.0]), 2)
                .unwrap_err(),
            RaflError::ZeroWeights
        );
        assert!(matches!(
            AggregationProblem::new(vec![a.clone(), a.clone()], Some(vec![-1.0, 2.0]), 2),
            Err(RaflError::BadWeight { index: 0, .. })
        ));
        let p = AggregationProblem::new(vec![a.clone(), a], None, 2).unwrap();
        assert_eq!(
            p.objective(&list(&["a", "q"])).unwrap_err(),
            RaflError::UnknownCandidate(StatementId::from("q"))
        );
        assert!(matches!(
            p.objective(&list(&["a"])),
            Err(RaflError::AggregateLength {
                len: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn weights_are_normalized_and_lists_truncated() {
        let p = AggregationProblem::new(
            vec![list(&["a", "b", "c"]), list(&["c", "d"])],
            Some(vec![3.0, 1.0]),
            2,
        )
        .unwrap();
        assert_eq!(p.weights(), &[0.75, 0.25]);
        assert_eq!(p.lists()[0].len(), 2);
        let ids: Vec<_> = p.candidates().iter().map(|c| c.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "d"]);
    }

    #[test]
    fn padding_uses_consensus_order() {
        let p =
            AggregationProblem::new(vec![list(&["a"]), list(&["b", "c", "a"])], None, 3).unwrap();
        let padded: Vec<_> = p
            .padded_input(0)
            .statements()
            .map(|s| s.as_str().to_string())
            .collect();
        assert_eq!(padded, ["a", "b", "c"]);
    }
}
