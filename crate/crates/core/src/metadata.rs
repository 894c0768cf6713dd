//! Grounding AMR triples in the KB: entity links, AMR type to class mapping and
//! the answer type of the `amr-unknown` node.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::{AmrGraph, NodeId, Span};
use crate::kb::{KbStore, OWL_THING};
use crate::text;
use crate::triples::AmrTriple;

#[derive(Debug, Error)]
pub enum MetadataError {
    #[error("conflicting annotations for `{surface}`: {first} and {second}")]
    ConflictingAnnotations {
        surface: String,
        first: String,
        second: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityAnnotation {
    pub surface: String,
    pub iri: String,
}

/// One question as read from the questions JSON-lines file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub text: String,
    pub amr: String,
    #[serde(default)]
    pub entities: Vec<EntityAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_relations: Option<Vec<String>>,
}

/// What an AMR triple endpoint stands for in the KB.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Grounding {
    Entity(String),
    Class(String),
    Literal(String),
    /// The answer placeholder, carrying the expected answer class.
    Unknown(String),
    Ungrounded,
}

impl Grounding {
    pub fn is_entity(&self) -> bool {
        matches!(self, Grounding::Entity(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedTriple {
    pub triple: AmrTriple,
    pub subject: Grounding,
    pub object: Grounding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_span: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_span: Option<Span>,
}

impl LinkedTriple {
    /// The same triple read in the other direction.
    pub fn reversed(&self) -> LinkedTriple {
        LinkedTriple {
            triple: self.triple.reversed(),
            subject: self.object.clone(),
            object: self.subject.clone(),
            subject_span: self.object_span.clone(),
            object_span: self.subject_span.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeMapping {
    pub amr_type: String,
    pub kb_class: String,
}

/// AMR concept to KB class table, read from `amr_type <TAB> kb_class` rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeMap {
    map: BTreeMap<String, String>,
}

impl TypeMap {
    pub fn new(rows: impl IntoIterator<Item = TypeMapping>) -> Result<TypeMap, String> {
        let mut map = BTreeMap::new();
        for row in rows {
            if let Some(prev) = map.insert(row.amr_type.clone(), row.kb_class.clone()) {
                if prev != row.kb_class {
                    return Err(format!(
                        "`{}` maps to both {prev} and {}",
                        row.amr_type, row.kb_class
                    ));
                }
            }
        }
        Ok(TypeMap { map })
    }

    pub fn load(path: &Path, kb: &KbStore) -> Result<TypeMap, MetadataError> {
        let body = fs::read_to_string(path).map_err(|source| MetadataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut rows = Vec::new();
        for (i, line) in body.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| MetadataError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let Some((amr_type, class)) = line.split_once('\t') else {
                return Err(malformed("expected `amr_type<TAB>kb_class`".into()));
            };
            rows.push(TypeMapping {
                amr_type: amr_type.trim().to_string(),
                kb_class: kb.canonical_iri(class),
            });
        }
        TypeMap::new(rows).map_err(|message| MetadataError::Malformed {
            path: path.to_path_buf(),
            line: 0,
            message,
        })
    }

    pub fn get(&self, amr_type: &str) -> Option<&str> {
        self.map.get(amr_type).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Links named-entity nodes to KB entities. Annotations are tried first, picking
/// the longest annotated surface that matches the node's name; nodes without a
/// matching annotation fall back to an exact, case-insensitive label lookup.
pub fn link_entities(
    graph: &AmrGraph,
    annotations: &[EntityAnnotation],
    kb: &KbStore,
) -> Result<BTreeMap<NodeId, String>, MetadataError> {
    let mut by_surface: BTreeMap<String, (&str, String)> = BTreeMap::new();
    for a in annotations {
        let iri = kb.canonical_iri(&a.iri);
        let key = text::fold(&a.surface);
        match by_surface.get(&key) {
            Some((_, prev)) if *prev != iri => {
                return Err(MetadataError::ConflictingAnnotations {
                    surface: a.surface.clone(),
                    first: prev.clone(),
                    second: iri,
                });
            }
            _ => {
                by_surface.insert(key, (&a.surface, iri));
            }
        }
    }

    let mut links = BTreeMap::new();
    for node in graph.nodes().iter().filter(|n| n.is_named()) {
        let name = graph.label(node.id);
        let folded = text::fold(&name);
        let annotated = by_surface
            .iter()
            .filter(|(key, _)| **key == folded || text::loosely_matches(key, &folded))
            .max_by(|(ka, (_, ia)), (kb_, (_, ib))| {
                (**ka == folded)
                    .cmp(&(**kb_ == folded))
                    .then(ka.chars().count().cmp(&kb_.chars().count()))
                    .then_with(|| ib.cmp(ia))
            })
            .map(|(_, (_, iri))| iri.clone());
        let linked = annotated.or_else(|| kb.entities_with_label(&name).into_iter().next());
        if let Some(iri) = linked {
            links.insert(node.id, iri);
        }
    }
    Ok(links)
}

/// KB class for an AMR concept: the mapping table first, then a class whose label
/// or local name equals the concept, then the same lookup without a plural `s`.
pub fn map_type(concept: &str, mapping: &TypeMap, kb: &KbStore) -> Option<String> {
    if let Some(c) = mapping.get(concept) {
        return Some(c.to_string());
    }
    let spaced = concept.replace('-', " ");
    if let Some(c) = kb.classes_with_label(&spaced).into_iter().next() {
        return Some(c);
    }
    let singular = spaced.strip_suffix('s')?;
    if let Some(c) = mapping.get(singular) {
        return Some(c.to_string());
    }
    kb.classes_with_label(singular).into_iter().next()
}

/// The declared answer type, or the most generic class when none is declared.
pub fn attach_answer_type(declared: Option<&str>, kb: &KbStore) -> String {
    if let Some(c) = declared {
        let c = kb.canonical_iri(c);
        if !kb.is_class(&c) && c != OWL_THING {
            warn!("answer type {c} is not in the class hierarchy");
        }
        return c;
    }
    match kb.hierarchy_roots().as_slice() {
        [only] => only.clone(),
        _ => OWL_THING.to_string(),
    }
}

/// Grounds every triple; the output has one entry per input triple.
pub fn ground(
    graph: &AmrGraph,
    triples: &[AmrTriple],
    links: &BTreeMap<NodeId, String>,
    mapping: &TypeMap,
    kb: &KbStore,
    answer_type: &str,
) -> Vec<LinkedTriple> {
    let endpoint = |id: NodeId| -> Grounding {
        let node = graph.node(id);
        if node.is_unknown() {
            return Grounding::Unknown(answer_type.to_string());
        }
        if let Some(iri) = links.get(&id) {
            return Grounding::Entity(iri.clone());
        }
        if node.is_constant() || node.concept == "date-entity" {
            return Grounding::Literal(graph.label(id));
        }
        match map_type(&node.concept, mapping, kb) {
            Some(c) => Grounding::Class(c),
            None => Grounding::Ungrounded,
        }
    };
    triples
        .iter()
        .map(|t| LinkedTriple {
            triple: t.clone(),
            subject: endpoint(t.subject.node),
            object: endpoint(t.object.node),
            subject_span: graph.node(t.subject.node).span.clone(),
            object_span: graph.node(t.object.node).span.clone(),
        })
        .collect()
}
