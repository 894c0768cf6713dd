use std::collections::{BTreeMap, BTreeSet};

use amr_relink::alignment::{relation_score, AlignmentTable};
use amr_relink::amr::parse_penman;
use amr_relink::embedding::{cosine, EmbeddingTable};
use amr_relink::eval::{evaluate, f1, Averaging, RelationSets};
use amr_relink::kb::{KbBuilder, KbError, KbStore, Literal, Term};
use amr_relink::metadata::{Grounding, LinkedTriple};
use amr_relink::rank::{aggregate, normalize};
use amr_relink::scorers::{kb_connection_score, ScoreMap};
use amr_relink::triples::{decompose, AmrPredicate};
use proptest::prelude::*;

type Fact = (usize, usize, usize);

fn entity(i: usize) -> String {
    format!("dbr:E{i}")
}

fn relation(j: usize) -> String {
    format!("dbo:rel{j}")
}

fn literal(i: usize) -> String {
    format!("{}", 1900 + i)
}

fn object_term(o: usize) -> Term {
    if o >= 100 {
        Term::Literal(Literal::new(&literal(o - 100)))
    } else {
        Term::Iri(entity(o))
    }
}

fn object_key(o: usize) -> String {
    if o >= 100 {
        literal(o - 100)
    } else {
        entity(o)
    }
}

fn facts() -> impl Strategy<Value = Vec<Fact>> {
    prop::collection::vec((0usize..8, 0usize..5, prop_oneof![0usize..8, 100usize..103]), 0..40)
}

fn store(facts: &[Fact]) -> KbStore {
    let mut b = KbBuilder::new();
    for &(s, r, o) in facts {
        b.add(&entity(s), &relation(r), object_term(o));
    }
    b.build().unwrap()
}

fn map() -> impl Strategy<Value = ScoreMap> {
    prop::collection::btree_map("r[0-9]", prop_oneof![-5.0f64..5.0, Just(0.0), Just(1.0)], 0..8)
}

fn linked(subject: Grounding, object: Grounding) -> LinkedTriple {
    let g = parse_penman("(b / bear-02 :ARG1 (p / person) :location (c / city))").unwrap();
    let triple = decompose(&g).into_iter().next().unwrap();
    LinkedTriple {
        triple,
        subject,
        object,
        subject_span: None,
        object_span: None,
    }
}

fn grounding() -> impl Strategy<Value = Grounding> {
    prop_oneof![
        (0usize..8).prop_map(|i| Grounding::Entity(entity(i))),
        (0usize..3).prop_map(|i| Grounding::Literal(literal(i))),
        Just(Grounding::Class("owl:Thing".to_string())),
        Just(Grounding::Unknown("owl:Thing".to_string())),
        Just(Grounding::Ungrounded),
    ]
}

fn relation_sets(ids: usize) -> impl Strategy<Value = RelationSets> {
    prop::collection::vec(prop::collection::btree_set("dbo:r[0-5]", 0..4), ids).prop_map(|sets| {
        sets.into_iter()
            .enumerate()
            .map(|(i, s)| (format!("q{i}"), s))
            .collect()
    })
}

fn brute_ratio(correct: usize, total: usize, other: usize) -> f64 {
    if total == 0 && other == 0 {
        1.0
    } else if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

#[test]
fn cyclic_hierarchy_is_rejected() {
    let mut b = KbBuilder::new();
    b.add_subclass("dbo:A", "dbo:B");
    b.add_subclass("dbo:B", "dbo:C");
    b.add_subclass("dbo:C", "dbo:A");
    assert!(matches!(b.build(), Err(KbError::Cycle(_))));
}

#[test]
fn relation_score_reference_values() {
    assert_eq!(relation_score(10, 10, 1), 1.0);
    assert_eq!(relation_score(5, 10, 1), 0.5);
    let expected = 1.0 / (1.0 + 3f64.ln());
    assert!((relation_score(10, 10, 3) - expected).abs() < 1e-12);
    assert_eq!(relation_score(0, 10, 2), 0.0);
}

#[test]
fn literal_year_matches_full_date() {
    let mut b = KbBuilder::new();
    b.add("dbr:Tesla", "dbo:birthDate", Term::Literal(Literal::new("1856-07-10")));
    let kb = b.build().unwrap();
    let lt = linked(Grounding::Entity("dbr:Tesla".into()), Grounding::Literal("1856".into()));
    assert_eq!(kb_connection_score(&lt, "dbo:birthDate", &kb), 1.0);
    let lt = linked(Grounding::Entity("dbr:Tesla".into()), Grounding::Ungrounded);
    assert_eq!(kb_connection_score(&lt, "dbo:birthDate", &kb), 0.5);
}

proptest! {
    #[test]
    fn kb_lookups_match_brute_force(facts in facts()) {
        let kb = store(&facts);
        let distinct: BTreeSet<Fact> = facts.iter().copied().collect();
        for s in 0..8 {
            for o in (0..8).chain(100..103) {
                let expected: BTreeSet<String> = distinct
                    .iter()
                    .filter(|f| f.0 == s && f.2 == o)
                    .map(|f| relation(f.1))
                    .collect();
                prop_assert_eq!(kb.relations_between(&entity(s), &object_key(o)), expected);
            }
        }
        for o in (0..8).chain(100..103) {
            let expected = distinct.iter().filter(|f| f.2 == o).count();
            prop_assert_eq!(kb.in_degree(&object_key(o)), expected);
        }
        let rels: BTreeSet<String> = distinct.iter().map(|f| relation(f.1)).collect();
        prop_assert_eq!(kb.relations(), rels.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn subclass_closure_matches_reachability(edges in prop::collection::vec((1usize..7, 0usize..7), 0..15)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| b < a).collect();
        let mut b = KbBuilder::new();
        for (sub, sup) in &edges {
            b.add_subclass(&format!("dbo:C{sub}"), &format!("dbo:C{sup}"));
        }
        let kb = b.build().unwrap();
        for a in 0..7 {
            let mut reach = BTreeSet::from([a]);
            loop {
                let next: BTreeSet<usize> = edges
                    .iter()
                    .filter(|(s, _)| reach.contains(s))
                    .map(|(_, p)| *p)
                    .chain(reach.iter().copied())
                    .collect();
                if next == reach {
                    break;
                }
                reach = next;
            }
            for c in 0..7 {
                prop_assert_eq!(
                    kb.is_subclass_of(&format!("dbo:C{a}"), &format!("dbo:C{c}")),
                    reach.contains(&c)
                );
            }
        }
    }

    #[test]
    fn kb_connection_is_three_valued_and_stable(facts in facts(), s in grounding(), o in grounding(), r in 0usize..5) {
        let kb = store(&facts);
        let lt = linked(s, o);
        let v = kb_connection_score(&lt, &relation(r), &kb);
        prop_assert!(v == 0.0 || v == 0.5 || v == 1.0);
        prop_assert_eq!(v, kb_connection_score(&lt, &relation(r), &kb));
        if lt.subject == Grounding::Ungrounded && lt.object == Grounding::Ungrounded {
            prop_assert_eq!(v, 0.0);
        }
        if matches!(lt.subject, Grounding::Ungrounded) || matches!(lt.object, Grounding::Ungrounded) {
            prop_assert!(v < 1.0);
        }
    }

    #[test]
    fn normalize_is_bounded_and_keeps_argmax(m in map()) {
        let n = normalize(&m);
        prop_assert_eq!(n.len(), m.len());
        prop_assert!(n.values().all(|v| (0.0..=1.0).contains(v)));
        if let Some(max) = m.values().copied().map(|v| v.max(0.0)).reduce(f64::max) {
            for (k, v) in &m {
                if v.max(0.0) == max {
                    prop_assert_eq!(n[k], 1.0);
                }
            }
        }
        prop_assert_eq!(normalize(&n), n.clone());
    }

    #[test]
    fn aggregate_ignores_scorer_order(maps in prop::collection::vec(map(), 0..5), seed in any::<u64>()) {
        let forward = aggregate(&maps);
        let mut shuffled = maps.clone();
        let len = shuffled.len();
        if len > 1 {
            shuffled.rotate_left((seed as usize) % len);
            shuffled.swap(0, len - 1);
        }
        prop_assert_eq!(aggregate(&shuffled), forward.clone());
        for w in forward.0.windows(2) {
            prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
        let bound = maps.len() as f64;
        prop_assert!(forward.0.iter().all(|(_, v)| *v >= 0.0 && *v <= bound + 1e-12));
    }

    #[test]
    fn max_cosine_matches_exhaustive_search(
        vectors in prop::collection::vec(prop::collection::vec(-1.0f32..1.0, 3), 1..8),
        a in prop::collection::vec(0usize..10, 0..4),
        b in prop::collection::vec(0usize..10, 0..4),
    ) {
        let words: Vec<String> = (0..vectors.len()).map(|i| format!("w{i}")).collect();
        let table = EmbeddingTable::from_pairs(words.iter().cloned().zip(vectors.iter().cloned())).unwrap();
        let name = |i: &usize| format!("w{i}");
        let a: Vec<String> = a.iter().map(name).collect();
        let b: Vec<String> = b.iter().map(name).collect();
        let mut best: Option<f64> = None;
        for x in &a {
            for y in &b {
                let (Some(i), Some(j)) = (words.iter().position(|w| w == x), words.iter().position(|w| w == y)) else {
                    continue;
                };
                let c = cosine(&vectors[i], &vectors[j]);
                best = Some(best.map_or(c, |m: f64| m.max(c)));
            }
        }
        prop_assert_eq!(table.max_cosine(&a, &b), best);
        if let Some(v) = best {
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&v));
        }
    }

    #[test]
    fn alignment_scores_are_monotone(counts in prop::collection::btree_map("p[0-3]", prop::collection::btree_map("dbo:r[0-4]", 1usize..20, 1..4), 1..4)) {
        let keyed: BTreeMap<String, BTreeMap<String, usize>> = counts
            .iter()
            .map(|(k, v)| (AmrPredicate::new(k, "arg0", "arg1").canonical(), v.clone()))
            .collect();
        let table = AlignmentTable::from_counts(keyed, Default::default());
        prop_assert!(table.check_consistency().is_ok());
        for (pred, rels) in &counts {
            let p = AmrPredicate::new(pred, "arg0", "arg1");
            let cands = table.candidates(&p);
            prop_assert_eq!(cands.len(), rels.len());
            prop_assert!(cands.iter().all(|(_, s)| *s > 0.0 && *s <= 1.0));
            if let Some((_, top)) = cands.first() {
                let max = *rels.values().max().unwrap();
                let any_unique = rels.iter().any(|(r, c)| *c == max && table.inv_pred_count[r] == 1);
                prop_assert_eq!(*top == 1.0, any_unique);
            }
            for (r1, c1) in rels {
                for (r2, c2) in rels {
                    let s = |r: &str| cands.iter().find(|(x, _)| x == r).unwrap().1;
                    if c1 >= c2 && table.inv_pred_count[r1] <= table.inv_pred_count[r2] {
                        prop_assert!(s(r1) >= s(r2));
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_predictions_score_one(gold in relation_sets(6)) {
        for averaging in [Averaging::Macro, Averaging::Micro] {
            let r = evaluate(&gold, &gold, averaging).unwrap();
            prop_assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn macro_and_micro_match_brute_force(pred in relation_sets(5), gold in relation_sets(5)) {
        let per: Vec<(usize, usize, usize)> = gold
            .iter()
            .map(|(id, g)| (pred[id].intersection(g).count(), pred[id].len(), g.len()))
            .collect();
        let n = per.len() as f64;
        let p: f64 = per.iter().map(|&(c, p, g)| brute_ratio(c, p, g)).sum::<f64>() / n;
        let r: f64 = per.iter().map(|&(c, p, g)| brute_ratio(c, g, p)).sum::<f64>() / n;
        let report = evaluate(&pred, &gold, Averaging::Macro).unwrap();
        prop_assert!((report.precision - p).abs() < 1e-12);
        prop_assert!((report.recall - r).abs() < 1e-12);
        prop_assert!((report.f1 - f1(p, r)).abs() < 1e-12);

        let (c, pt, gt) = per.iter().fold((0, 0, 0), |a, x| (a.0 + x.0, a.1 + x.1, a.2 + x.2));
        let micro = evaluate(&pred, &gold, Averaging::Micro).unwrap();
        prop_assert!((micro.precision - brute_ratio(c, pt, gt)).abs() < 1e-12);
        prop_assert!((micro.recall - brute_ratio(c, gt, pt)).abs() < 1e-12);
    }
}
