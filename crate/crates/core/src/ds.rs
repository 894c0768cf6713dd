//! Distant-supervision examples from a KB and an entity-tagged corpus.
//!
//! For every selected relation the best-connected KB triples are taken (by the
//! sum of subject and object in-degrees) and each one is paired with at most one
//! sentence: the first co-occurrence of its endpoints that passes the sentence
//! filters, searched in the subject's own document before anywhere else.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kb::{KbStore, Prefixes};
use crate::text::char_slice;

/// An entity mention, in char offsets of its sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub iri: String,
    pub start: usize,
    pub end: usize,
}

impl Mention {
    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosToken {
    pub text: String,
    pub pos: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSentence {
    pub doc_id: String,
    pub position: usize,
    pub text: String,
    #[serde(default)]
    pub mentions: Vec<Mention>,
    #[serde(default)]
    pub tokens: Vec<PosToken>,
}

/// A sentence labelled with the KB relation holding between two of its mentions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsExample {
    pub text: String,
    pub subj: Mention,
    pub obj: Mention,
    pub relation: String,
}

impl DsExample {
    pub fn subject_surface(&self) -> String {
        char_slice(&self.text, self.subj.start, self.subj.end)
    }

    pub fn object_surface(&self) -> String {
        char_slice(&self.text, self.obj.start, self.obj.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsConfig {
    /// Relations yielding fewer examples than this are dropped.
    pub min_examples: usize,
    /// Triples considered per relation, before any sentence search.
    pub triple_limit: usize,
}

impl Default for DsConfig {
    fn default() -> Self {
        DsConfig {
            min_examples: 10,
            triple_limit: 1000,
        }
    }
}

pub const MIN_TOKENS: usize = 4;

fn is_verb(tag: &str) -> bool {
    tag.starts_with('V')
}

/// The first pair of non-overlapping mentions of `s` and `o`, in order of the
/// subject mention, then the object mention.
pub fn mention_pair(sentence: &CorpusSentence, s: &str, o: &str) -> Option<(Mention, Mention)> {
    let mut subjects: Vec<&Mention> = sentence.mentions.iter().filter(|m| m.iri == s).collect();
    let mut objects: Vec<&Mention> = sentence.mentions.iter().filter(|m| m.iri == o).collect();
    subjects.sort_by_key(|m| (m.start, m.end));
    objects.sort_by_key(|m| (m.start, m.end));
    subjects.iter().find_map(|ms| {
        objects
            .iter()
            .find(|mo| !ms.overlaps(mo))
            .map(|mo| ((*ms).clone(), (*mo).clone()))
    })
}

/// Subject and object co-occur, at least [`MIN_TOKENS`] tokens, at least one
/// verb, and the two mentions do not overlap.
pub fn sentence_passes_filters(sentence: &CorpusSentence, s: &str, o: &str) -> bool {
    sentence.tokens.len() >= MIN_TOKENS
        && sentence.tokens.iter().any(|t| is_verb(&t.pos))
        && mention_pair(sentence, s, o).is_some()
}

/// Sentences indexed by the entities they mention. IRIs are stored in the
/// KB's compact form so that corpus and KB spellings agree.
#[derive(Debug, Clone, Default)]
pub struct CorpusIndex {
    sentences: Vec<CorpusSentence>,
    by_entity: HashMap<String, Vec<usize>>,
}

impl CorpusIndex {
    pub fn new(sentences: Vec<CorpusSentence>, prefixes: &Prefixes) -> CorpusIndex {
        let canon = |iri: &str| prefixes.parse_iri(iri).unwrap_or_else(|_| iri.trim().to_string());
        let mut sentences = sentences;
        let mut by_entity: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, s) in sentences.iter_mut().enumerate() {
            s.doc_id = canon(&s.doc_id);
            for m in &mut s.mentions {
                m.iri = canon(&m.iri);
                let list = by_entity.entry(m.iri.clone()).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        CorpusIndex {
            sentences,
            by_entity,
        }
    }

    pub fn sentences(&self) -> &[CorpusSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    fn mentioning_both(&self, s: &str, o: &str) -> Vec<usize> {
        let (Some(a), Some(b)) = (self.by_entity.get(s), self.by_entity.get(o)) else {
            return Vec::new();
        };
        let b: std::collections::HashSet<usize> = b.iter().copied().collect();
        a.iter().copied().filter(|i| b.contains(i)).collect()
    }
}

/// The passing sentence with the lowest position in the subject's document, else
/// the passing sentence with the lowest `(position, doc_id)` anywhere.
pub fn first_cooccurrence<'a>(
    index: &'a CorpusIndex,
    s: &str,
    o: &str,
) -> Option<&'a CorpusSentence> {
    let passing: Vec<(usize, &CorpusSentence)> = index
        .mentioning_both(s, o)
        .into_iter()
        .map(|i| (i, &index.sentences[i]))
        .filter(|(_, sent)| sentence_passes_filters(sent, s, o))
        .collect();
    let own = passing
        .iter()
        .filter(|(_, sent)| sent.doc_id == s)
        .min_by_key(|(i, sent)| (sent.position, *i));
    own.or_else(|| {
        passing
            .iter()
            .min_by(|(i, a), (j, b)| {
                (a.position, &a.doc_id, i).cmp(&(b.position, &b.doc_id, j))
            })
    })
    .map(|(_, sent)| *sent)
}

/// Triples of `relation` by descending in-degree sum, ties by `(s, o)`, capped at `limit`.
pub fn select_triples(kb: &KbStore, relation: &str, limit: usize) -> Vec<(String, String)> {
    let mut triples: Vec<(usize, String, String)> = kb
        .triples_of(relation)
        .into_iter()
        .map(|(s, o)| (kb.in_degree_sum(&s, &o), s, o))
        .collect();
    triples.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| (&a.1, &a.2).cmp(&(&b.1, &b.2))));
    triples.truncate(limit);
    triples.into_iter().map(|(_, s, o)| (s, o)).collect()
}

fn examples_for(kb: &KbStore, index: &CorpusIndex, relation: &str, limit: usize) -> Vec<DsExample> {
    select_triples(kb, relation, limit)
        .into_iter()
        .filter_map(|(s, o)| {
            let sent = first_cooccurrence(index, &s, &o)?;
            let (subj, obj) = mention_pair(sent, &s, &o)?;
            Some(DsExample {
                text: sent.text.clone(),
                subj,
                obj,
                relation: relation.to_string(),
            })
        })
        .collect()
}

/// Relations whose example count reaches `min_examples`.
pub fn select_relations(kb: &KbStore, index: &CorpusIndex, cfg: &DsConfig) -> Vec<String> {
    generate(kb, index, cfg).selected
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsOutput {
    pub examples: Vec<DsExample>,
    /// Relations that met the threshold, sorted.
    pub selected: Vec<String>,
    /// Relations below the threshold with their example counts.
    pub dropped: BTreeMap<String, usize>,
}

/// Examples for every relation meeting the threshold, grouped by relation in
/// IRI order and, within a relation, in triple selection order.
pub fn generate(kb: &KbStore, index: &CorpusIndex, cfg: &DsConfig) -> DsOutput {
    let per_relation: Vec<(String, Vec<DsExample>)> = kb
        .relations()
        .into_par_iter()
        .map(|r| {
            let ex = examples_for(kb, index, &r, cfg.triple_limit);
            (r, ex)
        })
        .collect();
    let mut out = DsOutput::default();
    for (r, ex) in per_relation {
        if ex.len() >= cfg.min_examples {
            out.selected.push(r);
            out.examples.extend(ex);
        } else {
            out.dropped.insert(r, ex.len());
        }
    }
    out
}
