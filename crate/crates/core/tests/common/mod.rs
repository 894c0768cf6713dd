#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use amr_relink::ds::{CorpusSentence, DsExample, Mention, PosToken};
use amr_relink::kb::{KbBuilder, KbStore, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy")
}

pub fn entity(i: usize) -> String {
    format!("dbr:E{i}")
}

/// A random KB over a handful of entities, and a corpus mentioning them.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub facts: BTreeSet<(String, String, String)>,
    pub corpus: Vec<CorpusSentence>,
}

impl Synthetic {
    pub fn kb(&self) -> KbStore {
        let mut b = KbBuilder::new();
        for (s, r, o) in &self.facts {
            b.add(s, r, Term::Iri(o.clone()));
        }
        b.build().unwrap()
    }
}

const TAGS: &[&str] = &["NN", "NNP", "DT", "IN", "VBD", "VBZ", "JJ"];

pub fn synthetic(seed: u64, entities: usize, sentences: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facts = BTreeSet::new();
    for _ in 0..entities * 2 {
        let s = rng.gen_range(0..entities);
        let o = rng.gen_range(0..entities);
        if s != o {
            facts.insert((entity(s), format!("dbo:rel{}", rng.gen_range(0..4)), entity(o)));
        }
    }
    let mut corpus = Vec::new();
    for n in 0..sentences {
        let len = rng.gen_range(2..9);
        let mut words = vec![format!("S{n}")];
        let mut tokens = vec![PosToken {
            text: words[0].clone(),
            pos: "NNP".into(),
        }];
        for _ in 1..len {
            let w = format!("w{}", rng.gen_range(0..50));
            tokens.push(PosToken {
                text: w.clone(),
                pos: TAGS.choose(&mut rng).unwrap().to_string(),
            });
            words.push(w);
        }
        let starts: Vec<usize> = words
            .iter()
            .scan(0, |off, w| {
                let s = *off;
                *off += w.chars().count() + 1;
                Some(s)
            })
            .collect();
        let mut mentions = Vec::new();
        for _ in 0..rng.gen_range(0..4) {
            let i = rng.gen_range(0..words.len());
            let j = (i + rng.gen_range(0..2)).min(words.len() - 1);
            mentions.push(Mention {
                iri: entity(rng.gen_range(0..entities)),
                start: starts[i],
                end: starts[j] + words[j].chars().count(),
            });
        }
        corpus.push(CorpusSentence {
            doc_id: entity(rng.gen_range(0..entities)),
            position: rng.gen_range(0..5),
            text: words.join(" "),
            mentions,
            tokens,
        });
    }
    Synthetic { facts, corpus }
}

fn overlaps(a: &Mention, b: &Mention) -> bool {
    a.start < b.end && b.start < a.end
}

fn pair_in(sent: &CorpusSentence, s: &str, o: &str) -> Option<(Mention, Mention)> {
    let mut subs: Vec<&Mention> = sent.mentions.iter().filter(|m| m.iri == s).collect();
    let mut objs: Vec<&Mention> = sent.mentions.iter().filter(|m| m.iri == o).collect();
    subs.sort_by_key(|m| (m.start, m.end));
    objs.sort_by_key(|m| (m.start, m.end));
    for a in &subs {
        for b in &objs {
            if !overlaps(a, b) {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

pub fn passes(sent: &CorpusSentence, s: &str, o: &str) -> bool {
    sent.tokens.len() >= 4 && sent.tokens.iter().any(|t| t.pos.starts_with('V')) && pair_in(sent, s, o).is_some()
}

/// Straight-line distant supervision: returns the examples and the kept relations.
pub fn brute_force_ds(
    facts: &BTreeSet<(String, String, String)>,
    corpus: &[CorpusSentence],
    min_examples: usize,
    limit: usize,
) -> (Vec<DsExample>, Vec<String>) {
    let in_degree = |e: &str| facts.iter().filter(|f| f.2 == e).count();
    let relations: BTreeSet<&String> = facts.iter().map(|f| &f.1).collect();
    let mut examples = Vec::new();
    let mut kept = Vec::new();
    for r in relations {
        let mut triples: Vec<(usize, &String, &String)> = facts
            .iter()
            .filter(|f| &f.1 == r)
            .map(|f| (in_degree(&f.0) + in_degree(&f.2), &f.0, &f.2))
            .collect();
        triples.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        triples.truncate(limit);
        let mut found = Vec::new();
        for (_, s, o) in triples {
            let candidates: Vec<(usize, &CorpusSentence)> =
                corpus.iter().enumerate().filter(|(_, c)| passes(c, s, o)).collect();
            let own = candidates
                .iter()
                .filter(|(_, c)| &c.doc_id == s)
                .min_by_key(|(i, c)| (c.position, *i));
            let chosen = own.or_else(|| candidates.iter().min_by_key(|(i, c)| (c.position, c.doc_id.clone(), *i)));
            if let Some((_, sent)) = chosen {
                let (subj, obj) = pair_in(sent, s, o).unwrap();
                found.push(DsExample {
                    text: sent.text.clone(),
                    subj,
                    obj,
                    relation: r.clone(),
                });
            }
        }
        if found.len() >= min_examples {
            kept.push(r.clone());
            examples.extend(found);
        }
    }
    (examples, kept)
}
