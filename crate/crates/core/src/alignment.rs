//! Statistical alignment of AMR binary predicates to KB relations.
//!
//! Each distant-supervision sentence is decomposed into AMR triples. A triple
//! whose endpoints match the example's subject and object mentions yields one
//! alignment between its predicate and the example's relation. Counts are
//! accumulated over the corpus, filtered by role type constraints induced from
//! the same data, and turned into candidate scores with [`relation_score`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::{frame_lemma, split_records, AmrGraph};
use crate::ds::DsExample;
use crate::embedding::EmbeddingTable;
use crate::kb::{KbRelation, KbStore, TypeRef, OWL_THING};
use crate::text;
use crate::triples::{decompose, AmrPredicate};

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("inconsistent alignment table: {0}")]
    Inconsistent(String),
    #[error("{examples} examples but {parses} AMR records")]
    Unpaired { examples: usize, parses: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentConfig {
    /// Minimum share of a role's observations a type needs to be admissible.
    pub theta: f64,
    /// Roles with fewer typed observations stay unconstrained.
    pub min_observations: usize,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            theta: 0.10,
            min_observations: 3,
        }
    }
}

/// PropBank aliases per frame, read from `frame <TAB> alias, alias, ...` rows.
#[derive(Debug, Clone, Default)]
pub struct FrameAliases {
    map: BTreeMap<String, Vec<String>>,
}

impl FrameAliases {
    pub fn load(path: &Path) -> Result<FrameAliases, AlignmentError> {
        let body = fs::read_to_string(path).map_err(|source| AlignmentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut out = FrameAliases::default();
        for (i, line) in body.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((frame, aliases)) = line.split_once('\t') else {
                return Err(AlignmentError::Malformed {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "expected `frame<TAB>aliases`".into(),
                });
            };
            out.insert(frame.trim(), aliases.split(',').map(str::trim));
        }
        Ok(out)
    }

    pub fn insert<'a>(&mut self, frame: &str, aliases: impl IntoIterator<Item = &'a str>) {
        let entry = self.map.entry(frame.to_ascii_lowercase()).or_default();
        entry.extend(aliases.into_iter().filter(|a| !a.is_empty()).map(str::to_string));
    }

    /// Aliases of `frame`, or its lemma when the frame has no entry.
    pub fn aliases_for(&self, frame: &str) -> Vec<String> {
        match self.map.get(frame) {
            Some(a) if !a.is_empty() => a.clone(),
            _ => vec![frame_lemma(frame).replace('-', " ")],
        }
    }
}

/// Predicates of `graph` whose triple endpoints match the example's mentions.
pub fn align_example(ex: &DsExample, graph: &AmrGraph) -> Vec<AmrPredicate> {
    let subj = ex.subject_surface();
    let obj = ex.object_surface();
    decompose(graph)
        .into_iter()
        .filter(|t| {
            text::loosely_matches(&t.subject.surface, &subj)
                && text::loosely_matches(&t.object.surface, &obj)
        })
        .map(|t| t.predicate)
        .collect()
}

/// Max-pooled cosine between two token sequences, 0 when either side is out of vocabulary.
pub fn token_similarity<A: AsRef<str>, B: AsRef<str>>(emb: &EmbeddingTable, a: &[A], b: &[B]) -> f64 {
    emb.max_cosine(a, b).unwrap_or(0.0)
}

/// The candidate whose label is closest to the frame aliases; ties go to the lower IRI.
pub fn disambiguate(
    candidates: &BTreeSet<String>,
    aliases: &[String],
    emb: &EmbeddingTable,
) -> Option<String> {
    if candidates.len() <= 1 {
        return candidates.iter().next().cloned();
    }
    if aliases.is_empty() {
        warn!("no aliases to disambiguate {candidates:?}, taking the first");
        return candidates.iter().next().cloned();
    }
    let alias_tokens: Vec<String> = aliases.iter().flat_map(|a| text::words(a)).collect();
    let mut best: Option<(&String, f64)> = None;
    for c in candidates {
        let s = token_similarity(emb, &KbRelation::new(c).label_tokens, &alias_tokens);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    best.map(|(c, _)| c.clone())
}

/// Observed types of one frame role and the ones admitted by the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleConstraint {
    pub counts: BTreeMap<TypeRef, usize>,
    pub total: usize,
    pub admissible: BTreeSet<TypeRef>,
}

/// Constraints keyed by `frame.role`, e.g. `bear-02.arg1`.
pub type ConstraintTable = BTreeMap<String, RoleConstraint>;

pub fn role_key(frame: &str, role: &str) -> String {
    format!("{frame}.{role}")
}

/// One aligned example: its predicate and the most specific types of its fillers.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub predicate: AmrPredicate,
    pub subject_type: Option<TypeRef>,
    pub object_type: Option<TypeRef>,
}

/// Admissible types per frame role: those covering at least `theta` of the
/// role's typed observations. Roles with fewer than `min_observations` typed
/// observations get no entry.
pub fn induce_constraints(observations: &[Observation], cfg: &AlignmentConfig) -> ConstraintTable {
    let mut counts: BTreeMap<String, BTreeMap<TypeRef, usize>> = BTreeMap::new();
    for o in observations {
        let p = &o.predicate;
        for (role, ty) in [(&p.subject_role, &o.subject_type), (&p.object_role, &o.object_type)] {
            if let Some(ty) = ty {
                *counts
                    .entry(role_key(&p.frame, role))
                    .or_default()
                    .entry(ty.clone())
                    .or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter_map(|(key, counts)| {
            let total: usize = counts.values().sum();
            if total < cfg.min_observations.max(1) {
                return None;
            }
            let admissible = counts
                .iter()
                .filter(|(_, &c)| c as f64 >= cfg.theta * total as f64)
                .map(|(t, _)| t.clone())
                .collect();
            Some((
                key,
                RoleConstraint {
                    counts,
                    total,
                    admissible,
                },
            ))
        })
        .collect()
}

fn type_admitted(kb: &KbStore, ty: &TypeRef, admissible: &BTreeSet<TypeRef>) -> bool {
    admissible.iter().any(|a| match (ty, a) {
        (TypeRef::Datatype(x), TypeRef::Datatype(y)) => x == y,
        (TypeRef::Class(x), TypeRef::Class(y)) => {
            y == OWL_THING || kb.is_subclass_of(x, y) || kb.is_subclass_of(y, x)
        }
        _ => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCount {
    pub relation: String,
    pub count: usize,
}

/// Cumulative predicate to relation counts, with the inverse predicate counts
/// and the type constraints that filtered them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AlignmentTable {
    pub counts: BTreeMap<String, Vec<RelationCount>>,
    pub inv_pred_count: BTreeMap<String, usize>,
    #[serde(default)]
    pub constraints: ConstraintTable,
}

/// `(c / max_c) * 1 / (1 + ln(inv_pred_count))`.
pub fn relation_score(count: usize, max_count: usize, inv_pred_count: usize) -> f64 {
    if count == 0 || max_count == 0 || inv_pred_count == 0 {
        return 0.0;
    }
    (count as f64 / max_count as f64) * (1.0 / (1.0 + (inv_pred_count as f64).ln()))
}

impl AlignmentTable {
    /// Builds the table from raw counts, dropping zero counts.
    pub fn from_counts(
        counts: BTreeMap<String, BTreeMap<String, usize>>,
        constraints: ConstraintTable,
    ) -> AlignmentTable {
        let mut table = AlignmentTable {
            constraints,
            ..Default::default()
        };
        for (pred, rels) in counts {
            let mut list: Vec<RelationCount> = rels
                .into_iter()
                .filter(|(_, c)| *c > 0)
                .map(|(relation, count)| RelationCount { relation, count })
                .collect();
            if list.is_empty() {
                continue;
            }
            list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.relation.cmp(&b.relation)));
            table.counts.insert(pred, list);
        }
        table.inv_pred_count = table.recount_inverse();
        table
    }

    fn recount_inverse(&self) -> BTreeMap<String, usize> {
        let mut inv = BTreeMap::new();
        for rels in self.counts.values() {
            let distinct: BTreeSet<&str> = rels.iter().map(|r| r.relation.as_str()).collect();
            for r in distinct {
                *inv.entry(r.to_string()).or_insert(0) += 1;
            }
        }
        inv
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn check_consistency(&self) -> Result<(), AlignmentError> {
        if let Some((p, _)) = self
            .counts
            .iter()
            .find(|(_, rels)| rels.iter().any(|r| r.count == 0))
        {
            return Err(AlignmentError::Inconsistent(format!("zero count under {p}")));
        }
        let recomputed = self.recount_inverse();
        if recomputed != self.inv_pred_count {
            return Err(AlignmentError::Inconsistent(
                "inv_pred_count disagrees with counts".into(),
            ));
        }
        Ok(())
    }

    pub fn count(&self, predicate: &AmrPredicate, relation: &str) -> usize {
        self.counts
            .get(&predicate.canonical())
            .and_then(|rels| rels.iter().find(|r| r.relation == relation))
            .map_or(0, |r| r.count)
    }

    /// Scored relations for a predicate, best first; empty for unseen predicates.
    pub fn candidates(&self, predicate: &AmrPredicate) -> Vec<(String, f64)> {
        let Some(rels) = self.counts.get(&predicate.canonical()) else {
            return Vec::new();
        };
        let max = rels.iter().map(|r| r.count).max().unwrap_or(0);
        let mut out: Vec<(String, f64)> = rels
            .iter()
            .map(|r| {
                let inv = self.inv_pred_count.get(&r.relation).copied().unwrap_or(1);
                (r.relation.clone(), relation_score(r.count, max, inv))
            })
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), AlignmentError> {
        let body = serde_json::to_string_pretty(self).map_err(|source| AlignmentError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        fs::write(path, body + "\n").map_err(|source| AlignmentError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<AlignmentTable, AlignmentError> {
        let body = fs::read_to_string(path).map_err(|source| AlignmentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let table: AlignmentTable =
            serde_json::from_str(&body).map_err(|source| AlignmentError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        table.check_consistency()?;
        Ok(table)
    }
}

/// Read-only resources shared by alignment builders.
#[derive(Clone, Copy)]
pub struct AlignContext<'a> {
    pub kb: &'a KbStore,
    pub aliases: &'a FrameAliases,
    pub embeddings: &'a EmbeddingTable,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub examples: usize,
    /// Examples whose sentence had no usable AMR.
    pub skipped: usize,
    /// Examples with an AMR but no triple matching both mentions.
    pub unaligned: usize,
    pub alignments: usize,
    /// Alignments dropped by the type constraints.
    pub filtered: usize,
}

type RecordKey = (AmrPredicate, String, String, String);

/// Accumulates raw alignments. Builders over disjoint shards can be merged in
/// any order; [`AlignmentBuilder::finish`] does the constraint pass.
#[derive(Debug, Clone, Default)]
pub struct AlignmentBuilder {
    records: BTreeMap<RecordKey, usize>,
    report: BuildReport,
}

impl AlignmentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one example. `graph` is `None` when the sentence failed to parse.
    pub fn add(&mut self, ctx: AlignContext<'_>, ex: &DsExample, graph: Option<&AmrGraph>) {
        self.report.examples += 1;
        let Some(graph) = graph else {
            self.report.skipped += 1;
            return;
        };
        let predicates = align_example(ex, graph);
        if predicates.is_empty() {
            self.report.unaligned += 1;
            return;
        }
        let s = ctx.kb.canonical_iri(&ex.subj.iri);
        let o = ctx.kb.canonical_iri(&ex.obj.iri);
        let relation = ctx.kb.canonical_iri(&ex.relation);
        let mut between = ctx.kb.relations_between(&s, &o);
        between.insert(relation.clone());
        for p in predicates {
            let aligned = if between.len() > 1 {
                disambiguate(&between, &ctx.aliases.aliases_for(&p.frame), ctx.embeddings)
                    .unwrap_or_else(|| relation.clone())
            } else {
                relation.clone()
            };
            *self
                .records
                .entry((p, aligned, s.clone(), o.clone()))
                .or_insert(0) += 1;
        }
    }

    pub fn merge(mut self, other: AlignmentBuilder) -> AlignmentBuilder {
        for (k, c) in other.records {
            *self.records.entry(k).or_insert(0) += c;
        }
        let (a, b) = (&mut self.report, other.report);
        a.examples += b.examples;
        a.skipped += b.skipped;
        a.unaligned += b.unaligned;
        self
    }

    pub fn finish(self, kb: &KbStore, cfg: &AlignmentConfig) -> (AlignmentTable, BuildReport) {
        let mut report = self.report;
        let typed: Vec<(&RecordKey, usize, Option<TypeRef>, Option<TypeRef>)> = self
            .records
            .iter()
            .map(|(k, &c)| (k, c, kb.most_specific_type(&k.2), kb.most_specific_type(&k.3)))
            .collect();
        let observations: Vec<Observation> = typed
            .iter()
            .flat_map(|(k, c, st, ot)| {
                std::iter::repeat_with(|| Observation {
                    predicate: k.0.clone(),
                    subject_type: st.clone(),
                    object_type: ot.clone(),
                })
                .take(*c)
            })
            .collect();
        let constraints = induce_constraints(&observations, cfg);

        let admits = |frame: &str, role: &str, ty: &Option<TypeRef>| -> bool {
            match (constraints.get(&role_key(frame, role)), ty) {
                (Some(rc), Some(ty)) => type_admitted(kb, ty, &rc.admissible),
                _ => true,
            }
        };
        let mut counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for ((p, relation, _, _), c, st, ot) in &typed {
            report.alignments += c;
            if admits(&p.frame, &p.subject_role, st) && admits(&p.frame, &p.object_role, ot) {
                *counts
                    .entry(p.canonical())
                    .or_default()
                    .entry(relation.clone())
                    .or_insert(0) += c;
            } else {
                report.filtered += c;
            }
        }
        (AlignmentTable::from_counts(counts, constraints), report)
    }
}

/// Pairs examples with the records of a multi-graph PENMAN file, one record
/// per example in order. A record that fails to parse, or whose `# ::snt`
/// line names a different sentence, pairs with `None`.
pub fn pair_parses(
    examples: Vec<DsExample>,
    penman: &str,
) -> Result<Vec<(DsExample, Option<AmrGraph>)>, AlignmentError> {
    let records = split_records(penman);
    if records.len() != examples.len() {
        return Err(AlignmentError::Unpaired {
            examples: examples.len(),
            parses: records.len(),
        });
    }
    Ok(examples
        .into_iter()
        .zip(records)
        .enumerate()
        .map(|(i, (ex, rec))| {
            if let Some(snt) = rec.metadata.get("snt") {
                if snt.trim() != ex.text.trim() {
                    warn!("record {}: sentence does not match example text", i + 1);
                    return (ex, None);
                }
            }
            let graph = match AmrGraph::parse_with_text(&rec.penman, &ex.text) {
                Ok(g) => Some(g),
                Err(e) => {
                    warn!("record {}: {e}", i + 1);
                    None
                }
            };
            (ex, graph)
        })
        .collect())
}

/// Builds the table from examples paired with their parses, counting shards in parallel.
pub fn build_table(
    ctx: AlignContext<'_>,
    examples: &[(DsExample, Option<AmrGraph>)],
    cfg: &AlignmentConfig,
) -> (AlignmentTable, BuildReport) {
    examples
        .par_iter()
        .fold(AlignmentBuilder::new, |mut b, (ex, g)| {
            b.add(ctx, ex, g.as_ref());
            b
        })
        .reduce(AlignmentBuilder::new, AlignmentBuilder::merge)
        .finish(ctx.kb, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;
    use crate::ds::Mention;
    use crate::kb::{Datatype, KbBuilder, Term};

    fn emb() -> EmbeddingTable {
        EmbeddingTable::read(
            "birth 1 0 0\nbear 0.9 0.1 0\ndeath 0 1 0\ndie 0.1 0.9 0\nplace 0.3 0.3 0.9\n".as_bytes(),
        )
        .unwrap()
    }

    fn kb() -> KbStore {
        let mut b = KbBuilder::new();
        let iri = |s: &str| Term::Iri(s.to_string());
        b.add("dbr:Nikola_Tesla", "dbo:birthPlace", iri("dbr:Smiljan"));
        b.add("dbr:Nikola_Tesla", "dbo:deathPlace", iri("dbr:Smiljan"));
        b.add("dbr:Barack_Obama", "dbo:birthPlace", iri("dbr:Honolulu"));
        b.add("dbr:Barack_Obama", "rdf:type", iri("dbo:Person"));
        b.add("dbr:Nikola_Tesla", "rdf:type", iri("dbo:Person"));
        b.add("dbr:Honolulu", "rdf:type", iri("dbo:City"));
        b.add("dbr:Smiljan", "rdf:type", iri("dbo:Village"));
        b.add_subclass("dbo:City", "dbo:Place");
        b.add_subclass("dbo:Village", "dbo:Place");
        b.build().unwrap()
    }

    fn example(text: &str, s: (&str, &str), o: (&str, &str), relation: &str) -> DsExample {
        let find = |surface: &str, iri: &str| {
            let byte = text.find(surface).unwrap();
            let start = text[..byte].chars().count();
            Mention {
                iri: iri.to_string(),
                start,
                end: start + surface.chars().count(),
            }
        };
        DsExample {
            text: text.to_string(),
            subj: find(s.0, s.1),
            obj: find(o.0, o.1),
            relation: relation.to_string(),
        }
    }

    const OBAMA_AMR: &str = r#"(b / bear-02
        :ARG1 (p / person :name (n / name :op1 "Barack" :op2 "Obama"))
        :location (c / city :name (n2 / name :op1 "Honolulu")))"#;

    fn obama() -> DsExample {
        example(
            "Barack Obama was born in Honolulu.",
            ("Barack Obama", "dbr:Barack_Obama"),
            ("Honolulu", "dbr:Honolulu"),
            "dbo:birthPlace",
        )
    }

    #[test]
    fn obama_aligns_bear_location() {
        let g = parse_penman(OBAMA_AMR).unwrap();
        let preds: Vec<String> = align_example(&obama(), &g).iter().map(|p| p.canonical()).collect();
        assert_eq!(preds, vec!["bear-02.arg1.location"]);
        let g = parse_penman("(r / run-01 :ARG0 (b / boy) :ARG1 (d / dog))").unwrap();
        assert!(align_example(&obama(), &g).is_empty());
    }

    #[test]
    fn tesla_aligns_one_of_twelve() {
        let g = parse_penman(
            r#"(b / bear-02
                :ARG0 (d / person :name (n / name :op1 "Duka" :op2 "Tesla"))
                :ARG1 (p / person :name (n2 / name :op1 "Nikola" :op2 "Tesla"))
                :location (v / village :name (n3 / name :op1 "Smiljan"))
                :time (d2 / date-entity :year 1856))"#,
        )
        .unwrap();
        let ex = example(
            "Nikola Tesla was born to Duka Tesla in Smiljan in 1856.",
            ("Nikola Tesla", "dbr:Nikola_Tesla"),
            ("Smiljan", "dbr:Smiljan"),
            "dbo:birthPlace",
        );
        assert_eq!(decompose(&g).len(), 12);
        let preds: Vec<String> = align_example(&ex, &g).iter().map(|p| p.canonical()).collect();
        assert_eq!(preds, vec!["bear-02.arg1.location"]);
    }

    #[test]
    fn disambiguation() {
        let e = emb();
        let both: BTreeSet<String> = ["dbo:birthPlace", "dbo:deathPlace"].map(String::from).into();
        let aliases: Vec<String> = ["bear", "birth", "give birth"].map(String::from).into();
        assert_eq!(disambiguate(&both, &aliases, &e).unwrap(), "dbo:birthPlace");
        let die: Vec<String> = vec!["die".into()];
        assert_eq!(disambiguate(&both, &die, &e).unwrap(), "dbo:deathPlace");
        let one: BTreeSet<String> = ["dbo:x".to_string()].into();
        assert_eq!(disambiguate(&one, &[], &e).unwrap(), "dbo:x");
        assert_eq!(disambiguate(&both, &[], &e).unwrap(), "dbo:birthPlace");
        let oov: Vec<String> = vec!["qqq".into()];
        assert_eq!(disambiguate(&both, &oov, &e).unwrap(), "dbo:birthPlace");
        assert_eq!(disambiguate(&BTreeSet::new(), &aliases, &e), None);
    }

    fn obs(pred: &str, s: &str, o: &str) -> Observation {
        let ty = |t: &str| {
            Some(if t == "date" {
                TypeRef::Datatype(Datatype::Date)
            } else {
                TypeRef::Class(t.to_string())
            })
        };
        Observation {
            predicate: pred.parse().unwrap(),
            subject_type: ty(s),
            object_type: ty(o),
        }
    }

    #[test]
    fn constraints_threshold() {
        let cfg = AlignmentConfig::default();
        let mut v: Vec<Observation> =
            (0..19).map(|_| obs("bear-02.arg1.location", "dbo:Person", "dbo:Place")).collect();
        v.push(obs("bear-02.arg1.location", "dbo:Person", "dbo:Person"));
        let c = induce_constraints(&v, &cfg);
        assert_eq!(c["bear-02.arg1"].admissible, [TypeRef::Class("dbo:Person".into())].into());
        assert_eq!(c["bear-02.location"].admissible, [TypeRef::Class("dbo:Place".into())].into());
        assert_eq!(c["bear-02.location"].counts.values().sum::<usize>(), 20);
        assert!(induce_constraints(&[], &cfg).is_empty());
        let few = vec![obs("die-01.arg1.time", "dbo:Person", "date"); 2];
        assert!(induce_constraints(&few, &cfg).is_empty());
    }

    #[test]
    fn scores_match_formula() {
        let table = AlignmentTable::from_counts(
            [(
                "p-01.arg0.arg1".to_string(),
                [("r1".to_string(), 10), ("r2".to_string(), 5)].into(),
            )]
            .into(),
            ConstraintTable::new(),
        );
        let p: AmrPredicate = "p-01.arg0.arg1".parse().unwrap();
        assert_eq!(table.candidates(&p), vec![("r1".into(), 1.0), ("r2".into(), 0.5)]);
        assert!(table.candidates(&"q-01.arg0.arg1".parse().unwrap()).is_empty());
        assert!((relation_score(10, 10, 3) - 0.476_505_3).abs() < 1e-6);
        table.check_consistency().unwrap();
    }

    #[test]
    fn build_counts_and_filters() {
        let kb = kb();
        let e = emb();
        let aliases = FrameAliases::default();
        let ctx = AlignContext {
            kb: &kb,
            aliases: &aliases,
            embeddings: &e,
        };
        let g = parse_penman(OBAMA_AMR).unwrap();
        let mut examples: Vec<(DsExample, Option<AmrGraph>)> =
            (0..10).map(|_| (obama(), Some(g.clone()))).collect();
        let (table, report) = build_table(ctx, &examples, &AlignmentConfig::default());
        assert_eq!(
            table.counts["bear-02.arg1.location"],
            vec![RelationCount {
                relation: "dbo:birthPlace".into(),
                count: 10
            }]
        );
        assert_eq!(report.examples, 10);

        // a person in the location slot is out of type once places dominate
        let odd = example(
            "Barack Obama was born in Tesla.",
            ("Barack Obama", "dbr:Barack_Obama"),
            ("Tesla", "dbr:Nikola_Tesla"),
            "dbo:relative",
        );
        let odd_g = parse_penman(
            r#"(b / bear-02 :ARG1 (p / person :name (n / name :op1 "Barack" :op2 "Obama"))
                 :location (c / city :name (n2 / name :op1 "Tesla")))"#,
        )
        .unwrap();
        examples.push((odd, Some(odd_g)));
        examples.push((obama(), None));
        let (table, report) = build_table(ctx, &examples, &AlignmentConfig::default());
        assert_eq!(table.counts["bear-02.arg1.location"].len(), 1);
        assert_eq!(report.filtered, 1);
        assert_eq!(report.skipped, 1);
        assert!(!table.inv_pred_count.contains_key("dbo:relative"));

        let (empty, _) = build_table(ctx, &[], &AlignmentConfig::default());
        assert!(empty.is_empty());
    }

    #[test]
    fn tesla_birth_and_death_disambiguated_by_frame() {
        let kb = kb();
        let e = emb();
        let mut aliases = FrameAliases::default();
        aliases.insert("bear-02", ["bear", "birth", "give birth"]);
        let ctx = AlignContext {
            kb: &kb,
            aliases: &aliases,
            embeddings: &e,
        };
        let text = "Nikola Tesla was born in Smiljan.";
        let g = parse_penman(
            r#"(b / bear-02 :ARG1 (p / person :name (n / name :op1 "Nikola" :op2 "Tesla"))
                 :location (v / village :name (n2 / name :op1 "Smiljan")))"#,
        )
        .unwrap();
        let s = ("Nikola Tesla", "dbr:Nikola_Tesla");
        let o = ("Smiljan", "dbr:Smiljan");
        let examples = vec![
            (example(text, s, o, "dbo:birthPlace"), Some(g.clone())),
            (example(text, s, o, "dbo:deathPlace"), Some(g)),
        ];
        let (table, _) = build_table(ctx, &examples, &AlignmentConfig::default());
        let p: AmrPredicate = "bear-02.arg1.location".parse().unwrap();
        assert_eq!(table.count(&p, "dbo:birthPlace"), 2);
        assert_eq!(table.count(&p, "dbo:deathPlace"), 0);
    }

    #[test]
    fn json_round_trip_and_consistency() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let mut table = AlignmentTable::from_counts(
            [("a-01.arg0.arg1".to_string(), [("dbo:x".to_string(), 3)].into())].into(),
            induce_constraints(
                &vec![obs("a-01.arg0.arg1", "dbo:Person", "date"); 3],
                &AlignmentConfig::default(),
            ),
        );
        table.save(&path).unwrap();
        assert_eq!(AlignmentTable::load(&path).unwrap(), table);
        table.inv_pred_count.insert("dbo:y".into(), 1);
        table.save(&path).unwrap();
        assert!(matches!(
            AlignmentTable::load(&path),
            Err(AlignmentError::Inconsistent(_))
        ));
    }
}
