use super::{AggregationProblem, FootruleObjective, RaflError};
use crate::ranked::RankedList;

/// Largest number of arrangements [`brute_force_aggregate`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Number of length-`k` arrangements of `n` candidates, `n! / (n - k)!`.
pub fn arrangement_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).fold(1u128, |acc, x| acc.saturating_mul(x as u128))
}

/// Exact minimizer of the weighted footrule objective, found by enumerating
/// every arrangement in lexicographic order of statement ids and keeping the
/// first one with the lowest objective.
pub fn brute_force_aggregate(
    problem: &AggregationProblem,
) -> Result<(RankedList, FootruleObjective), RaflError> {
    let n = problem.candidates().len();
    let k = problem.k();
    let arrangements = arrangement_count(n, k);
    if arrangements > BRUTE_FORCE_LIMIT {
        return Err(RaflError::TooLarge {
            arrangements,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut search = Search {
        problem,
        used: vec![false; n],
        current: Vec::with_capacity(k),
        best: None,
    };
    search.descend();
    let (objective, order) = search
        .best
        .expect("k <= candidates, so an arrangement exists");
    Ok((problem.to_ranked(&order), FootruleObjective(objective)))
}

struct Search<'a> {
    problem: &'a AggregationProblem,
    used: Vec<bool>,
    current: Vec<u32>,
    best: Option<(f64, Vec<u32>)>,
}

impl Search<'_> {
    fn descend(&mut self) {
        if self.current.len() == self.problem.k() {
            let value = self.problem.objective_of(&self.current);
            let better = match &self.best {
                None => true,
                Some((best, _)) => value < best - super::ce::TIE_EPSILON * best.max(1.0),
            };
            if better {
                self.best = Some((value, self.current.clone()));
            }
            return;
        }
        for c in 0..self.used.len() {
            if self.used[c] {
                continue;
            }
            self.used[c] = true;
            self.current.push(c as u32);
            self.descend();
            self.current.pop();
            self.used[c] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::list;
    use super::*;

    fn order(l: &RankedList) -> Vec<&str> {
        l.statements().map(|s| s.as_str()).collect()
    }

    #[test]
    fn identical_lists() {
        let p = AggregationProblem::new(
            vec![list(&["b", "a", "c"]), list(&["b", "a", "c"])],
            None,
            3,
        )
        .unwrap();
        let (agg, obj) = brute_force_aggregate(&p).unwrap();
        assert_eq!(order(&agg), ["b", "a", "c"]);
        assert_eq!(obj.value(), 0.0);
    }

    #[test]
    fn swapped_pair_takes_lexicographic_tie() {
        let p =
            AggregationProblem::new(vec![list(&["x", "y"]), list(&["y", "x"])], None, 2).unwrap();
        let (agg, obj) = brute_force_aggregate(&p).unwrap();
        assert_eq!(order(&agg), ["x", "y"]);
        assert_eq!(obj.value(), 1.0);
    }

    #[test]
    fn majority_of_three() {
        let p = AggregationProblem::new(
            vec![
                list(&["x", "y", "z"]),
                list(&["x", "z", "y"]),
                list(&["x", "y", "z"]),
            ],
            None,
            3,
        )
        .unwrap();
        let (agg, obj) = brute_force_aggregate(&p).unwrap();
        assert_eq!(order(&agg), ["x", "y", "z"]);
        assert!((obj.value() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_large() {
        let ids: Vec<String> = (0..12).map(|i| format!("s{i:02}")).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let p = AggregationProblem::new(vec![list(&refs[..8]), list(&refs[4..])], None, 8).unwrap();
        assert!(matches!(
            brute_force_aggregate(&p),
            Err(RaflError::TooLarge {
                arrangements: 19_958_400,
                ..
            })
        ));
    }

    #[test]
    fn counts() {
        assert_eq!(arrangement_count(7, 5), 2520);
        assert_eq!(arrangement_count(3, 3), 6);
        assert_eq!(arrangement_count(3, 0), 1);
        assert_eq!(arrangement_count(2, 3), 0);
    }
}
