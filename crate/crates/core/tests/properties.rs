use std::collections::{BTreeMap, BTreeSet};

use faultloc::blues::{
    bm25, rank_statements, BugReport, DocField, QueryField, RetrievalConfig, StatementCorpus,
    StatementDocument, TermBag, Tokenizer,
};
use faultloc::eval::accuracy_at;
use faultloc::rafl::{ce_aggregate, footrule, AggregationProblem, CeConfig};
use faultloc::spectra::{ochiai, CoverageSpectrum, Outcome};
use faultloc::{RankedList, StatementId};
use proptest::prelude::*;

fn sid(i: usize) -> StatementId {
    StatementId::new(format!("s{i:02}"))
}

/// Coverage matrix with `n` statements and at least one failing test.
fn spectrum() -> impl Strategy<Value = CoverageSpectrum> {
    (1usize..8, 1usize..10).prop_flat_map(|(n, t)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), n), t),
            prop::collection::vec(any::<bool>(), t),
        )
            .prop_map(move |(rows, mut fails)| {
                fails[0] = true;
                let outcomes = fails
                    .into_iter()
                    .map(|f| if f { Outcome::Fail } else { Outcome::Pass })
                    .collect();
                CoverageSpectrum::new((0..n).map(sid).collect(), rows, outcomes).unwrap()
            })
    })
}

fn scores(l: &RankedList) -> BTreeMap<String, f64> {
    l.entries()
        .iter()
        .map(|e| (e.statement.as_str().to_owned(), e.score))
        .collect()
}

/// A ranked list over a random subset of `universe` candidates.
fn partial_list(universe: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..universe).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_flat_map(move |perm| {
            let hi = perm.len().min(max_len);
            (1..=hi).prop_map(move |len| perm[..len].to_vec())
        })
}

fn to_list(order: &[usize], k: usize) -> RankedList {
    let len = order.len();
    RankedList::from_ordered(
        order
            .iter()
            .enumerate()
            .map(|(i, &c)| (sid(c), (len - i) as f64)),
        k,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ochiai_is_bounded_and_ranked(s in spectrum()) {
        let list = ochiai(&s, None);
        prop_assert_eq!(list.len(), s.statements().len());
        for (i, e) in list.entries().iter().enumerate() {
            prop_assert_eq!(e.rank, i + 1);
            prop_assert!((0.0..=1.0).contains(&e.score));
            if i > 0 {
                let prev = &list.entries()[i - 1];
                prop_assert!(prev.score > e.score
                    || (prev.score == e.score && prev.statement < e.statement));
            }
        }
    }

    #[test]
    fn ochiai_ignores_test_order(s in spectrum(), seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..s.num_tests()).collect();
        // deterministic shuffle from the seed
        let mut x = seed | 1;
        for i in (1..idx.len()).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            idx.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let rows = idx.iter().map(|&i| s.rows()[i].clone()).collect();
        let outcomes = idx.iter().map(|&i| s.outcomes()[i]).collect();
        let shuffled = CoverageSpectrum::new(s.statements().to_vec(), rows, outcomes).unwrap();
        prop_assert_eq!(ochiai(&s, None), ochiai(&shuffled, None));
    }

    #[test]
    fn duplicating_every_test_keeps_scores(s in spectrum()) {
        let rows: Vec<Vec<bool>> = s.rows().iter().chain(s.rows()).cloned().collect();
        let outcomes = s.outcomes().iter().chain(s.outcomes()).copied().collect();
        let doubled = CoverageSpectrum::new(s.statements().to_vec(), rows, outcomes).unwrap();
        let (a, b) = (scores(&ochiai(&s, None)), scores(&ochiai(&doubled, None)));
        for (id, v) in &a {
            prop_assert!((v - b[id]).abs() < 1e-12);
        }
    }

    #[test]
    fn ochiai_truncation_is_a_prefix(s in spectrum(), k in 0usize..10) {
        let full = ochiai(&s, None);
        let cut = ochiai(&s, Some(k));
        prop_assert_eq!(cut.len(), k.min(full.len()));
        prop_assert_eq!(cut.entries(), &full.entries()[..cut.len()]);
    }

    #[test]
    fn csv_round_trip(raw in prop::collection::vec((0usize..30, -1e3f64..1e3), 0..20)) {
        let mut seen = BTreeSet::new();
        let items: Vec<(StatementId, f64)> = raw
            .into_iter()
            .filter(|(i, _)| seen.insert(*i))
            // six-decimal output, so round first
            .map(|(i, s)| (sid(i), (s * 1e6).round() / 1e6))
            .collect();
        let list = RankedList::from_scores(items, 100).unwrap();
        let back = RankedList::read_csv(list.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.len(), list.len());
        for (a, b) in list.entries().iter().zip(back.entries()) {
            prop_assert_eq!(&a.statement, &b.statement);
            prop_assert_eq!(a.rank, b.rank);
            prop_assert!((a.score - b.score).abs() < 1e-9);
        }
    }

    #[test]
    fn footrule_is_a_symmetric_metric(
        a in partial_list(8, 5),
        b in partial_list(8, 5),
        c in partial_list(8, 5),
    ) {
        let (la, lb, lc) = (to_list(&a, 5), to_list(&b, 5), to_list(&c, 5));
        let ab = footrule(&la, &lb, 5).unwrap();
        prop_assert_eq!(ab, footrule(&lb, &la, 5).unwrap());
        prop_assert_eq!(footrule(&la, &la, 5).unwrap(), 0.0);
        prop_assert!(ab >= 0.0);
        let via = footrule(&la, &lc, 5).unwrap() + footrule(&lc, &lb, 5).unwrap();
        prop_assert!(ab <= via + 1e-12);
    }
}

fn corpus_docs() -> impl Strategy<Value = Vec<StatementDocument>> {
    const VOCAB: [&str; 8] = [
        "read", "file", "parse", "token", "index", "cach", "user", "valu",
    ];
    let bag = prop::collection::vec(prop::sample::select(&VOCAB[..]), 0..6)
        .prop_map(|ts| ts.into_iter().collect::<TermBag>());
    prop::collection::vec(
        (
            prop::collection::vec(prop::sample::select(&VOCAB[..]), 1..6),
            bag.clone(),
            bag.clone(),
            bag,
        ),
        1..12,
    )
    .prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, (stmt, m, c, com))| StatementDocument {
                statement: sid(i),
                fields: BTreeMap::from([
                    (DocField::Statement, stmt.into_iter().collect()),
                    (DocField::Method, m),
                    (DocField::Class, c),
                    (DocField::Comment, com),
                ]),
            })
            .collect()
    })
}

fn order(l: &RankedList) -> Vec<StatementId> {
    l.statements().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_all_weights_keeps_the_ranking(docs in corpus_docs(), exp in 1i32..4) {
        let corpus = StatementCorpus::from_documents(docs);
        let report = BugReport::new("P-1", "parse file index", "user value cache read").unwrap();
        let tok = Tokenizer::default();
        let base = RetrievalConfig::default();
        let mut scaled = base.clone();
        for q in QueryField::ALL {
            for d in DocField::ALL {
                scaled.set_weight(q, d, base.weight(q, d) * 2f64.powi(exp));
            }
        }
        let a = rank_statements(&corpus, &report, &base, &tok).unwrap();
        let b = rank_statements(&corpus, &report, &scaled, &tok).unwrap();
        prop_assert_eq!(order(&a), order(&b));
        prop_assert_eq!(a.clone(), rank_statements(&corpus, &report, &base, &tok).unwrap());
    }

    #[test]
    fn bm25_is_zero_without_overlap_and_positive_with_it(docs in corpus_docs(), b in 0.0f64..=1.0) {
        let corpus = StatementCorpus::from_documents(docs);
        let stats = corpus.stats(DocField::Statement);
        for doc in corpus.documents() {
            let bag = doc.field(DocField::Statement).unwrap();
            let absent = vec!["zzzz".to_owned()];
            prop_assert_eq!(bm25(stats, &absent, bag, 1.2, b), 0.0);
            let (present, _) = bag.terms().next().unwrap();
            prop_assert!(bm25(stats, &[present.to_owned()], bag, 1.2, b) > 0.0);
        }
    }

    #[test]
    fn bm25_grows_with_term_frequency(tf in 1u32..20, len_extra in 0u32..10) {
        let mut docs = Vec::new();
        for i in 0..3 {
            let mut stmt = TermBag::default();
            stmt.add("other");
            if i == 0 {
                for _ in 0..len_extra { stmt.add("pad"); }
            }
            docs.push(StatementDocument {
                statement: sid(i),
                fields: BTreeMap::from([(DocField::Statement, stmt)]),
            });
        }
        let corpus = StatementCorpus::from_documents(docs);
        let stats = corpus.stats(DocField::Statement);
        let bag = |n: u32| {
            let mut t = TermBag::default();
            for _ in 0..n { t.add("hit"); }
            t.add("other");
            t
        };
        let q = vec!["hit".to_owned()];
        prop_assert!(bm25(stats, &q, &bag(tf + 1), 1.2, 0.0) > bm25(stats, &q, &bag(tf), 1.2, 0.0));
    }
}

fn problem() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<f64>, u64)> {
    (
        prop::collection::vec(partial_list(7, 5), 2..4),
        prop::collection::vec(0.1f64..1.0, 4),
        any::<u64>(),
    )
        .prop_map(|(lists, w, seed)| {
            let n = lists.len();
            (lists, w[..n].to_vec(), seed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ce_never_loses_to_its_inputs((lists, weights, seed) in problem()) {
        let candidates: BTreeSet<usize> = lists.iter().flatten().copied().collect();
        let k = candidates.len().min(5);
        let ranked: Vec<RankedList> = lists.iter().map(|l| to_list(&l[..l.len().min(k)], k)).collect();
        let p = AggregationProblem::new(ranked, Some(weights), k).unwrap();
        let out = ce_aggregate(&p, &CeConfig::with_seed(seed)).unwrap();
        prop_assert_eq!(out.list.len(), k);
        for i in 0..p.lists().len() {
            let input = p.objective(&p.padded_input(i)).unwrap().value();
            prop_assert!(out.objective.value() <= input + 1e-9);
        }
        prop_assert!((p.objective(&out.list).unwrap().value() - out.objective.value()).abs() < 1e-9);
        let again = ce_aggregate(&p, &CeConfig::with_seed(seed)).unwrap();
        prop_assert_eq!(out.list, again.list);
    }

    #[test]
    fn ce_is_invariant_under_order_preserving_relabeling((lists, weights, seed) in problem()) {
        let candidates: BTreeSet<usize> = lists.iter().flatten().copied().collect();
        let k = candidates.len().min(5);
        let build = |prefix: &str| {
            let ranked = lists
                .iter()
                .map(|l| {
                    let l = &l[..l.len().min(k)];
                    RankedList::from_ordered(
                        l.iter().enumerate().map(|(i, &c)| {
                            (StatementId::new(format!("{prefix}{c:02}")), (l.len() - i) as f64)
                        }),
                        k,
                    )
                    .unwrap()
                })
                .collect();
            AggregationProblem::new(ranked, Some(weights.clone()), k).unwrap()
        };
        let a = ce_aggregate(&build("a."), &CeConfig::with_seed(seed)).unwrap();
        let b = ce_aggregate(&build("pkg.B#m()#"), &CeConfig::with_seed(seed)).unwrap();
        prop_assert_eq!(a.objective, b.objective);
        let strip = |l: &RankedList, p: &str| -> Vec<String> {
            l.statements().map(|s| s.as_str().trim_start_matches(p).to_owned()).collect()
        };
        prop_assert_eq!(strip(&a.list, "a."), strip(&b.list, "pkg.B#m()#"));
    }

    #[test]
    fn accuracy_counts_are_monotone_and_order_free(
        best in prop::collection::vec(prop::option::of(1usize..120), 1..15),
    ) {
        let mut lists = BTreeMap::new();
        let mut truth = BTreeMap::new();
        for (d, rank) in best.iter().enumerate() {
            let target = StatementId::new("bug");
            let len = rank.unwrap_or(120);
            let entries = (1..=len).map(|r| {
                let id = if Some(r) == *rank { target.clone() } else { StatementId::new(format!("x{r}")) };
                (id, (len - r) as f64)
            });
            lists.insert(format!("D{d:02}"), RankedList::from_ordered(entries, len).unwrap());
            truth.insert(format!("D{d:02}"), BTreeSet::from([target]));
        }
        let cutoffs = [1, 10, 25, 50, 100];
        let report = accuracy_at(&lists, &truth, &cutoffs).unwrap();
        let shuffled: Vec<usize> = cutoffs.iter().rev().copied().collect();
        prop_assert_eq!(&report, &accuracy_at(&lists, &truth, &shuffled).unwrap());
        for w in report.cutoffs.windows(2) {
            prop_assert!(w[0].localized <= w[1].localized);
        }
        for c in &report.cutoffs {
            let expected = best.iter().filter(|r| r.is_some_and(|r| r <= c.k)).count();
            prop_assert_eq!(c.localized, expected);
            prop_assert_eq!(c.total, best.len());
        }

        // one more defect found at rank 1 bumps every cutoff by one
        lists.insert("ZZ".into(), RankedList::from_ordered([(StatementId::new("bug"), 1.0)], 1).unwrap());
        truth.insert("ZZ".into(), BTreeSet::from([StatementId::new("bug")]));
        let bumped = accuracy_at(&lists, &truth, &cutoffs).unwrap();
        for (a, b) in report.cutoffs.iter().zip(&bumped.cutoffs) {
            prop_assert_eq!(a.localized + 1, b.localized);
        }
    }
}
