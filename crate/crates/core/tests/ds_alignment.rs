mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use amr_relink::alignment::{build_table, pair_parses, AlignContext, AlignmentConfig, FrameAliases};
use amr_relink::config::PipelineConfig;
use amr_relink::ds::{generate, CorpusIndex, DsConfig, DsExample};
use amr_relink::embedding::EmbeddingTable;
use amr_relink::jsonl;
use amr_relink::kb::KbStore;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_ds, passes, synthetic, toy_dir};

struct Toy {
    kb: KbStore,
    aliases: FrameAliases,
    embeddings: EmbeddingTable,
    examples: Vec<DsExample>,
    penman: String,
}

fn toy() -> Toy {
    let dir = toy_dir();
    let cfg = PipelineConfig::load(&dir.join("config.toml")).unwrap();
    Toy {
        kb: KbStore::load(
            cfg.require("kb").unwrap(),
            cfg.optional("labels").unwrap(),
            cfg.optional("hierarchy").unwrap(),
        )
        .unwrap(),
        aliases: FrameAliases::load(cfg.require("frame_aliases").unwrap()).unwrap(),
        embeddings: EmbeddingTable::load(cfg.require("embeddings").unwrap()).unwrap(),
        examples: jsonl::read(&dir.join("ds.jsonl")).unwrap(),
        penman: fs::read_to_string(dir.join("ds_amr.penman")).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ds_matches_brute_force(seed in any::<u64>(), min_examples in 0usize..4, limit in 1usize..12) {
        let syn = synthetic(seed, 8, 50);
        let kb = syn.kb();
        let index = CorpusIndex::new(syn.corpus.clone(), kb.prefixes());
        let cfg = DsConfig { min_examples, triple_limit: limit };
        let out = generate(&kb, &index, &cfg);
        let (expected, kept) = brute_force_ds(&syn.facts, &syn.corpus, min_examples, limit);
        prop_assert_eq!(&out.examples, &expected);
        prop_assert_eq!(&out.selected, &kept);

        let mut seen = BTreeSet::new();
        let mut per_relation: BTreeMap<&str, usize> = BTreeMap::new();
        for ex in &out.examples {
            prop_assert!(seen.insert((&ex.subj.iri, &ex.obj.iri, &ex.relation)));
            *per_relation.entry(&ex.relation).or_default() += 1;
            let sent = syn.corpus.iter().find(|c| c.text == ex.text).unwrap();
            prop_assert!(passes(sent, &ex.subj.iri, &ex.obj.iri));
            prop_assert!(syn.facts.contains(&(ex.subj.iri.clone(), ex.relation.clone(), ex.obj.iri.clone())));
        }
        prop_assert!(per_relation.values().all(|&n| n <= limit && n >= min_examples));

        let again = generate(&kb, &CorpusIndex::new(syn.corpus.clone(), kb.prefixes()), &cfg);
        prop_assert_eq!(jsonl::to_string(&out.examples), jsonl::to_string(&again.examples));
    }
}

#[test]
fn toy_ds_file_is_reproducible() {
    let dir = toy_dir();
    let t = toy();
    let sentences = jsonl::read(&dir.join("corpus.jsonl")).unwrap();
    let index = CorpusIndex::new(sentences, t.kb.prefixes());
    let out = generate(&t.kb, &index, &DsConfig { min_examples: 2, triple_limit: 1000 });
    assert_eq!(jsonl::to_string(&out.examples), fs::read_to_string(dir.join("ds.jsonl")).unwrap());
}

#[test]
fn alignment_table_ignores_example_order() {
    let t = toy();
    let ctx = AlignContext {
        kb: &t.kb,
        aliases: &t.aliases,
        embeddings: &t.embeddings,
    };
    let cfg = AlignmentConfig::default();
    let paired = pair_parses(t.examples.clone(), &t.penman).unwrap();
    assert!(paired.iter().all(|(_, g)| g.is_some()));
    let (table, report) = build_table(ctx, &paired, &cfg);
    table.check_consistency().unwrap();
    assert!(!table.is_empty());
    assert_eq!(report.examples, t.examples.len());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let mut shuffled = paired.clone();
        shuffled.shuffle(&mut rng);
        let (other, other_report) = build_table(ctx, &shuffled, &cfg);
        assert_eq!(other, table);
        assert_eq!(other_report, report);
    }

    for rc in table.constraints.values() {
        assert_eq!(rc.total, rc.counts.values().sum::<usize>());
        assert!(rc.total >= cfg.min_observations);
        for (ty, c) in &rc.counts {
            assert_eq!(rc.admissible.contains(ty), *c as f64 >= cfg.theta * rc.total as f64);
        }
    }

    let saved = fs::read_to_string(toy_dir().join("table.json")).unwrap();
    assert_eq!(serde_json::to_string_pretty(&table).unwrap() + "\n", saved);
}

#[test]
fn more_evidence_never_lowers_a_score() {
    let t = toy();
    let ctx = AlignContext {
        kb: &t.kb,
        aliases: &t.aliases,
        embeddings: &t.embeddings,
    };
    let cfg = AlignmentConfig::default();
    let paired = pair_parses(t.examples.clone(), &t.penman).unwrap();
    let (base, _) = build_table(ctx, &paired, &cfg);
    for (pred, rels) in &base.counts {
        for r in rels {
            let doubled: BTreeMap<String, BTreeMap<String, usize>> = base
                .counts
                .iter()
                .map(|(p, rs)| {
                    let m = rs
                        .iter()
                        .map(|x| {
                            let c = if p == pred && x.relation == r.relation { x.count + 1 } else { x.count };
                            (x.relation.clone(), c)
                        })
                        .collect();
                    (p.clone(), m)
                })
                .collect();
            let bumped = amr_relink::alignment::AlignmentTable::from_counts(doubled, Default::default());
            let p = pred.parse().unwrap();
            let before = base.candidates(&p).into_iter().find(|(x, _)| *x == r.relation).unwrap().1;
            let after = bumped.candidates(&p).into_iter().find(|(x, _)| *x == r.relation).unwrap().1;
            assert!(after >= before, "{pred} {}", r.relation);
        }
    }
}

#[test]
fn synthetic_corpora_produce_examples() {
    let total: usize = (0..20)
        .map(|seed| {
            let syn = synthetic(seed, 8, 50);
            let (examples, _) = brute_force_ds(&syn.facts, &syn.corpus, 1, 1000);
            examples.len()
        })
        .sum();
    eprintln!("{total} examples over 20 corpora");
    assert!(total >= 20);
}
