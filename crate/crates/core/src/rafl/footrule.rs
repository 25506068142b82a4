use std::collections::HashMap;

use super::RaflError;
use crate::ranked::{RankedList, StatementId};

/// Spearman footrule distance between two top-k lists: the sum over every
/// statement in either list of the absolute rank difference, where a missing
/// statement is ranked `k + 1`.
pub fn footrule(a: &RankedList, b: &RankedList, k: usize) -> Result<f64, RaflError> {
    for l in [a, b] {
        if l.len() > k {
            return Err(RaflError::ListLongerThanK { len: l.len(), k });
        }
    }
    let rank_b: HashMap<&StatementId, usize> =
        b.entries().iter().map(|e| (&e.statement, e.rank)).collect();
    let absent = k + 1;
    let mut total = 0usize;
    for e in a.entries() {
        let rb = rank_b.get(&e.statement).copied().unwrap_or(absent);
        total += e.rank.abs_diff(rb);
    }
    let in_a: std::collections::HashSet<&StatementId> = a.statements().collect();
    for e in b.entries() {
        if !in_a.contains(&e.statement) {
            total += absent.abs_diff(e.rank);
        }
    }
    Ok(total as f64)
}
