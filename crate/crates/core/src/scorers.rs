//! Relation scorers sharing one contract.
//!
//! A scorer maps a grounded AMR triple and its question to raw, non-negative
//! scores over candidate relations. Relations a scorer has no opinion on are
//! left out of its map; aggregation treats them as 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::alignment::{token_similarity, AlignmentTable};
use crate::embedding::EmbeddingTable;
use crate::kb::{Datatype, Direction, KbRelation, KbStore, Term, TypeRef};
use crate::metadata::{Grounding, LinkedTriple};
use crate::neural::{NeuralBackend, NeuralRequest};
use crate::text;
use crate::triples::AmrPredicate;

pub type ScoreMap = BTreeMap<String, f64>;

pub const ALIGN: &str = "align";
pub const LEXICAL: &str = "lexical";
pub const KB: &str = "kb";
pub const NEURAL: &str = "neural";

/// Scorer names in their canonical order.
pub const ALL_SCORERS: [&str; 4] = [ALIGN, LEXICAL, KB, NEURAL];

pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;

    fn score(&self, question: &str, triple: &LinkedTriple, candidates: &[KbRelation]) -> ScoreMap;
}

/// Max-pooled cosine between the relation's label words and the question words
/// followed by the predicate's frame lemma. Returns 0 when either side is
/// entirely out of vocabulary. The result lies in `[-1, 1]`.
pub fn lexical_score(
    question: &str,
    predicate: &AmrPredicate,
    relation: &KbRelation,
    emb: &EmbeddingTable,
) -> f64 {
    let mut tokens = text::words(question);
    tokens.extend(text::words(crate::amr::frame_lemma(&predicate.frame)));
    token_similarity(emb, &relation.label_tokens, &tokens)
}

pub struct LexicalScorer {
    embeddings: Arc<EmbeddingTable>,
}

impl LexicalScorer {
    pub fn new(embeddings: Arc<EmbeddingTable>) -> Self {
        LexicalScorer { embeddings }
    }
}

impl Scorer for LexicalScorer {
    fn name(&self) -> &str {
        LEXICAL
    }

    fn score(&self, question: &str, triple: &LinkedTriple, candidates: &[KbRelation]) -> ScoreMap {
        candidates
            .iter()
            .map(|r| {
                let s = lexical_score(question, &triple.triple.predicate, r, &self.embeddings);
                (r.iri.clone(), s.max(0.0))
            })
            .collect()
    }
}

/// Same datatype, or a year against a full date with that year.
fn literal_matches(term: &Term, value: &str) -> bool {
    let Term::Literal(l) = term else { return false };
    let want = Datatype::sniff(value);
    if l.datatype == want {
        return true;
    }
    let year_of = |v: &str| v.split('-').next().map(str::to_string);
    matches!(
        (l.datatype, want),
        (Datatype::Date, Datatype::Number) | (Datatype::Number, Datatype::Date)
    ) && year_of(&l.value) == year_of(value)
}

/// Whether a KB term fits an endpoint grounding. Ungrounded endpoints fit nothing.
fn fits(kb: &KbStore, g: &Grounding, term: &Term) -> bool {
    match g {
        Grounding::Entity(e) => term.as_iri() == Some(e.as_str()),
        Grounding::Class(c) | Grounding::Unknown(c) => {
            kb.is_term_compatible(term, &TypeRef::Class(c.clone()))
        }
        Grounding::Literal(v) => literal_matches(term, v),
        Grounding::Ungrounded => false,
    }
}

/// Soft KB-connection constraint with three levels.
///
/// The anchors of a triple are its entity endpoints, or its class and literal
/// endpoints when it has no entity. A relation scores 0.5 when it touches every
/// anchor in the anchor's position, and 1.0 when, in addition, a single KB
/// triple of the relation fits both endpoints (entity identity, class or answer
/// type compatibility, literal datatype). Otherwise it scores 0.
pub fn kb_connection_score(lt: &LinkedTriple, relation: &str, kb: &KbStore) -> f64 {
    let ends = [(&lt.subject, Direction::Subject), (&lt.object, Direction::Object)];
    let entities: Vec<(&str, Direction)> = ends
        .iter()
        .filter_map(|(g, d)| match g {
            Grounding::Entity(e) => Some((e.as_str(), *d)),
            _ => None,
        })
        .collect();
    let touches = if !entities.is_empty() {
        entities
            .iter()
            .all(|(e, d)| kb.relations_of(e, *d, None).contains(relation))
    } else {
        let anchors: Vec<&(&Grounding, Direction)> = ends
            .iter()
            .filter(|(g, _)| matches!(g, Grounding::Class(_) | Grounding::Literal(_)))
            .collect();
        !anchors.is_empty()
            && anchors.iter().all(|(g, d)| match d {
                Direction::Subject => kb.any_triple(relation, |t| fits(kb, g, t), |_| true),
                Direction::Object => kb.any_triple(relation, |_| true, |t| fits(kb, g, t)),
            })
    };
    if !touches {
        return 0.0;
    }
    if kb.any_triple(relation, |t| fits(kb, &lt.subject, t), |t| fits(kb, &lt.object, t)) {
        1.0
    } else {
        0.5
    }
}

pub struct KbConnectionScorer {
    kb: Arc<KbStore>,
}

impl KbConnectionScorer {
    pub fn new(kb: Arc<KbStore>) -> Self {
        KbConnectionScorer { kb }
    }
}

impl Scorer for KbConnectionScorer {
    fn name(&self) -> &str {
        KB
    }

    fn score(&self, _question: &str, triple: &LinkedTriple, candidates: &[KbRelation]) -> ScoreMap {
        candidates
            .iter()
            .filter_map(|r| {
                let s = kb_connection_score(triple, &r.iri, &self.kb);
                (s > 0.0).then(|| (r.iri.clone(), s))
            })
            .collect()
    }
}

/// Scores from the alignment table for the triple's predicate.
pub struct AlignmentScorer {
    table: Arc<AlignmentTable>,
}

impl AlignmentScorer {
    pub fn new(table: Arc<AlignmentTable>) -> Self {
        AlignmentScorer { table }
    }
}

impl Scorer for AlignmentScorer {
    fn name(&self) -> &str {
        ALIGN
    }

    fn score(&self, _question: &str, triple: &LinkedTriple, _candidates: &[KbRelation]) -> ScoreMap {
        self.table.candidates(&triple.triple.predicate).into_iter().collect()
    }
}

/// Passes the neural service's distribution through unchanged.
pub struct NeuralScorer {
    backend: Box<dyn NeuralBackend>,
}

impl NeuralScorer {
    pub fn new(backend: Box<dyn NeuralBackend>) -> Self {
        NeuralScorer { backend }
    }
}

impl Scorer for NeuralScorer {
    fn name(&self) -> &str {
        NEURAL
    }

    fn score(&self, question: &str, triple: &LinkedTriple, _candidates: &[KbRelation]) -> ScoreMap {
        let request = NeuralRequest::for_triple(question, triple);
        match self.backend.distribution(&request) {
            Ok(scores) => scores
                .into_iter()
                .filter(|(_, p)| p.is_finite())
                .map(|(r, p)| (r, p.max(0.0)))
                .collect(),
            Err(e) => {
                log::warn!("neural scorer unavailable: {e}");
                ScoreMap::new()
            }
        }
    }
}
