//! End-to-end relation linking for one question record, plus loading of the
//! shared resources from a [`PipelineConfig`].
//!
//! Every AMR triple is scored by each enabled scorer and the scores are
//! aggregated. A triple and its reverse describe the same relation mention, so
//! only the orientation with the stronger best score contributes its top `k`
//! relations to the prediction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Duration;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{AlignmentError, AlignmentTable};
use crate::amr::AmrGraph;
use crate::config::{ConfigError, PipelineConfig};
use crate::embedding::{EmbeddingError, EmbeddingTable};
use crate::eval::{evaluate, Averaging, IdMismatch, RelationSets};
use crate::kb::{KbError, KbRelation, KbStore};
use crate::metadata::{self, LinkedTriple, MetadataError, QuestionRecord, TypeMap};
use crate::neural::{NeuralBackend, NeuralError, StubNeural, TcpNeuralClient};
use crate::rank::{aggregate, RankedRelations};
use crate::scorers::{
    AlignmentScorer, KbConnectionScorer, LexicalScorer, NeuralScorer, ScoreMap, Scorer, ALIGN, KB,
    LEXICAL, NEURAL,
};
use crate::triples::decompose;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Metadata(#[from] MetadataError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
}

/// A failed question, tagged with the stage that failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage}: {message}")]
pub struct LinkError {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleScores {
    pub triple: LinkedTriple,
    /// Raw scores per scorer, before normalization.
    pub modules: BTreeMap<String, ScoreMap>,
    pub ranked: RankedRelations,
    /// Whether this orientation contributed to the prediction.
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkOutput {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub triples: Vec<TripleScores>,
    pub predicted: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Aggregates each triple over the scorers accepted by `enabled`, then keeps
/// the stronger orientation of every triple/reverse pair. Returns the
/// deduplicated prediction (in first-seen order) and the per-triple selection flags.
pub fn select(
    triples: &[TripleScores],
    enabled: impl Fn(&str) -> bool,
    k: usize,
) -> (Vec<String>, Vec<bool>) {
    let ranked: Vec<RankedRelations> = triples
        .iter()
        .map(|t| {
            aggregate(
                t.modules
                    .iter()
                    .filter(|(name, _)| enabled(name))
                    .map(|(_, m)| m),
            )
        })
        .collect();
    let key = |t: &LinkedTriple| {
        (
            t.triple.subject.node,
            t.triple.predicate.canonical(),
            t.triple.object.node,
        )
    };
    let index: HashMap<_, usize> = triples
        .iter()
        .enumerate()
        .map(|(i, t)| (key(&t.triple), i))
        .collect();
    let mut selected = vec![false; triples.len()];
    let mut seen = vec![false; triples.len()];
    let mut predicted: Vec<String> = Vec::new();
    for i in 0..triples.len() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let rev = index
            .get(&key(&triples[i].triple.reversed()))
            .copied()
            .filter(|&j| j != i && !seen[j]);
        let mut pick = i;
        if let Some(j) = rev {
            seen[j] = true;
            if ranked[j].top_score() > ranked[i].top_score() {
                pick = j;
            }
        }
        let top = ranked[pick].top_k(k);
        if !top.is_empty() {
            selected[pick] = true;
        }
        for r in top {
            if !predicted.contains(&r) {
                predicted.push(r);
            }
        }
    }
    (predicted, selected)
}

pub struct Linker {
    kb: Arc<KbStore>,
    types: Arc<TypeMap>,
    table: Option<Arc<AlignmentTable>>,
    relations: Vec<KbRelation>,
    scorers: Vec<Box<dyn Scorer>>,
    k: usize,
}

impl Linker {
    pub fn new(kb: Arc<KbStore>, types: Arc<TypeMap>, k: usize) -> Linker {
        let relations = kb.relations().iter().map(|r| KbRelation::new(r)).collect();
        Linker {
            kb,
            types,
            table: None,
            relations,
            scorers: Vec::new(),
            k: k.max(1),
        }
    }

    /// Also adds the table's relations to the candidate pool.
    pub fn with_alignment(mut self, table: Arc<AlignmentTable>) -> Linker {
        self.table = Some(table.clone());
        self.with_scorer(Box::new(AlignmentScorer::new(table)))
    }

    pub fn with_scorer(mut self, scorer: Box<dyn Scorer>) -> Linker {
        self.scorers.push(scorer);
        self
    }

    pub fn kb(&self) -> &KbStore {
        &self.kb
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scorer_names(&self) -> Vec<String> {
        self.scorers.iter().map(|s| s.name().to_string()).collect()
    }

    /// Builds a linker with the scorers enabled in `cfg`. A scorer whose
    /// resources are absent from the configuration is skipped with a warning.
    pub fn from_config(cfg: &PipelineConfig) -> Result<Linker, LoadError> {
        let kb = KbStore::load(
            cfg.require("kb")?,
            cfg.optional("labels")?,
            cfg.optional("hierarchy")?,
        )?;
        for w in kb.warnings() {
            warn!("{w}");
        }
        let types = match cfg.optional("type_mapping")? {
            Some(p) => TypeMap::load(p, &kb)?,
            None => TypeMap::default(),
        };
        let mut linker = Linker::new(Arc::new(kb), Arc::new(types), cfg.k);
        if cfg.scorer_enabled(ALIGN) {
            match cfg.optional("alignment_table")? {
                Some(p) => linker = linker.with_alignment(Arc::new(AlignmentTable::load(p)?)),
                None => warn!("alignment scorer enabled but no alignment_table configured"),
            }
        }
        if cfg.scorer_enabled(LEXICAL) {
            match cfg.optional("embeddings")? {
                Some(p) => {
                    let emb = EmbeddingTable::load(p)?;
                    linker = linker.with_scorer(Box::new(LexicalScorer::new(Arc::new(emb))));
                }
                None => warn!("lexical scorer enabled but no embeddings configured"),
            }
        }
        if cfg.scorer_enabled(KB) {
            let kb = linker.kb.clone();
            linker = linker.with_scorer(Box::new(KbConnectionScorer::new(kb)));
        }
        if cfg.scorer_enabled(NEURAL) {
            let backend: Option<Box<dyn NeuralBackend>> = if let Some(addr) = &cfg.neural_endpoint {
                Some(Box::new(TcpNeuralClient::new(
                    addr,
                    Duration::from_millis(cfg.neural_timeout_ms),
                )))
            } else if let Some(p) = cfg.optional("neural_stub")? {
                Some(Box::new(StubNeural::load(p)?))
            } else {
                warn!("neural scorer enabled but neither neural_endpoint nor neural_stub is set");
                None
            };
            if let Some(b) = backend {
                linker = linker.with_scorer(Box::new(NeuralScorer::new(b)));
            }
        }
        Ok(linker)
    }

    fn candidates(&self, lt: &LinkedTriple) -> Vec<KbRelation> {
        let mut pool = self.relations.clone();
        if let Some(table) = &self.table {
            let known: BTreeSet<String> = pool.iter().map(|r| r.iri.clone()).collect();
            for (r, _) in table.candidates(&lt.triple.predicate) {
                if !known.contains(&r) {
                    pool.push(KbRelation::new(&r));
                }
            }
        }
        pool
    }

    /// Grounded triples of a question, before scoring.
    pub fn ground(&self, q: &QuestionRecord) -> Result<(AmrGraph, Vec<LinkedTriple>), LinkError> {
        let stage = |stage: &'static str| move |e: &dyn std::fmt::Display| LinkError {
            stage,
            message: e.to_string(),
        };
        let graph = AmrGraph::parse_with_text(&q.amr, &q.text).map_err(|e| stage("amr")(&e))?;
        graph.unknown_node().map_err(|e| stage("amr")(&e))?;
        let triples = decompose(&graph);
        let links = metadata::link_entities(&graph, &q.entities, &self.kb)
            .map_err(|e| stage("entity-linking")(&e))?;
        let answer_type = metadata::attach_answer_type(q.answer_type.as_deref(), &self.kb);
        let linked = metadata::ground(&graph, &triples, &links, &self.types, &self.kb, &answer_type);
        Ok((graph, linked))
    }

    pub fn link(&self, q: &QuestionRecord) -> Result<LinkOutput, LinkError> {
        let (_, linked) = self.ground(q)?;
        let mut triples: Vec<TripleScores> = linked
            .into_iter()
            .map(|lt| {
                let pool = self.candidates(&lt);
                let modules: BTreeMap<String, ScoreMap> = self
                    .scorers
                    .iter()
                    .map(|s| (s.name().to_string(), s.score(&q.text, &lt, &pool)))
                    .collect();
                let ranked = aggregate(modules.values());
                TripleScores {
                    triple: lt,
                    modules,
                    ranked,
                    selected: false,
                }
            })
            .collect();
        let (predicted, selected) = select(&triples, |_| true, self.k);
        for (t, s) in triples.iter_mut().zip(selected) {
            t.selected = s;
        }
        Ok(LinkOutput {
            id: q.id.clone(),
            text: q.text.clone(),
            triples,
            predicted,
            error: None,
        })
    }

    /// Links every question in parallel. Failed questions are kept with an
    /// empty prediction and their error.
    pub fn link_all(&self, questions: &[QuestionRecord]) -> Vec<LinkOutput> {
        questions
            .par_iter()
            .map(|q| {
                self.link(q).unwrap_or_else(|e| {
                    warn!("question {}: {e}", q.id);
                    LinkOutput {
                        id: q.id.clone(),
                        text: q.text.clone(),
                        triples: Vec::new(),
                        predicted: Vec::new(),
                        error: Some(e.to_string()),
                    }
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub name: String,
    pub scorers: Vec<String>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Re-aggregates linked questions over scorer subsets: the full set first,
/// then every leave-one-out subset. Failed questions predict nothing in every row.
pub fn ablate(
    outputs: &[LinkOutput],
    gold: &RelationSets,
    scorers: &[String],
    k: usize,
    averaging: Averaging,
) -> Result<Vec<AblationRow>, IdMismatch> {
    let mut configs: Vec<(String, Vec<String>)> = vec![("full".to_string(), scorers.to_vec())];
    for left_out in scorers {
        let rest: Vec<String> = scorers.iter().filter(|s| *s != left_out).cloned().collect();
        configs.push((format!("w/o {left_out}"), rest));
    }
    configs
        .into_iter()
        .map(|(name, enabled)| {
            let predictions: RelationSets = outputs
                .iter()
                .map(|o| {
                    let (pred, _) = select(&o.triples, |s| enabled.iter().any(|e| e == s), k);
                    (o.id.clone(), pred.into_iter().collect())
                })
                .collect();
            let report = evaluate(&predictions, gold, averaging)?;
            Ok(AblationRow {
                name,
                scorers: enabled,
                precision: report.precision,
                recall: report.recall,
                f1: report.f1,
            })
        })
        .collect()
}

/// Predicted relation sets keyed by question id.
pub fn predictions(outputs: &[LinkOutput]) -> RelationSets {
    outputs
        .iter()
        .map(|o| (o.id.clone(), o.predicted.iter().cloned().collect()))
        .collect()
}

/// Gold relation sets of the questions that carry one.
pub fn gold_sets(questions: &[QuestionRecord]) -> RelationSets {
    questions
        .iter()
        .filter_map(|q| {
            q.gold_relations
                .as_ref()
                .map(|g| (q.id.clone(), g.iter().cloned().collect()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::NodeId;
    use crate::metadata::Grounding;
    use crate::triples::{AmrTriple, TripleEnd};

    fn ts(s: usize, pred: &str, o: usize, scores: &[(&str, f64)]) -> TripleScores {
        let end = |n| TripleEnd {
            node: NodeId(n),
            surface: format!("n{n}"),
        };
        let modules: BTreeMap<String, ScoreMap> = [(
            "m".to_string(),
            scores.iter().map(|(r, v)| (r.to_string(), *v)).collect(),
        )]
        .into();
        TripleScores {
            triple: LinkedTriple {
                triple: AmrTriple {
                    subject: end(s),
                    predicate: pred.parse().unwrap(),
                    object: end(o),
                },
                subject: Grounding::Ungrounded,
                object: Grounding::Ungrounded,
                subject_span: None,
                object_span: None,
            },
            ranked: aggregate(modules.values()),
            modules,
            selected: false,
        }
    }

    #[test]
    fn orientation_choice() {
        let triples = vec![
            ts(0, "a-01.arg0.arg1", 1, &[("r1", 1.0), ("r2", 0.5)]),
            ts(1, "a-01.arg1.arg0", 0, &[("r3", 1.0), ("r4", 0.0)]),
            ts(1, "b-01.arg0.arg1", 2, &[("r5", 1.0), ("r6", 0.0)]),
            ts(2, "b-01.arg1.arg0", 1, &[("r7", 1.0), ("r8", 0.0), ("r9", 1.0)]),
        ];
        let (pred, sel) = select(&triples, |_| true, 1);
        assert_eq!(pred, vec!["r1", "r5"]);
        assert_eq!(sel, vec![true, false, true, false]);
        let (pred, _) = select(&triples, |_| true, 2);
        assert_eq!(pred, vec!["r1", "r5"]);
        let (pred, _) = select(&triples, |_| false, 1);
        assert!(pred.is_empty());
    }
}
