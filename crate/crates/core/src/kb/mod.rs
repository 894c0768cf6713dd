//! Read-only, in-memory knowledge base.
//!
//! The store is built once from three flat files and never mutated afterwards:
//!
//! - `kb.tsv`: `subject <TAB> relation <TAB> object`, optionally preceded by
//!   `@prefix p: <namespace>` lines. `rdf:type`, `rdfs:label` and
//!   `rdfs:subClassOf` rows feed the typing, label and hierarchy tables instead of
//!   the relation index.
//! - `labels.tsv`: `iri <TAB> label`, several rows per IRI allowed.
//! - `hierarchy.tsv`: `subclass <TAB> superclass`.
//!
//! IRIs are kept in compact `prefix:local` form whenever a known namespace
//! matches, so `<http://dbpedia.org/ontology/birthPlace>` and `dbo:birthPlace`
//! are the same key.

mod nt;
mod term;

pub use nt::{convert_ntriples, ConvertSummary};
pub use term::{Datatype, Literal, Prefixes, Term, TypeRef};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use thiserror::Error;

use crate::text;

pub const RDF_TYPE: &str = "rdf:type";
pub const RDFS_LABEL: &str = "rdfs:label";
pub const RDFS_SUBCLASS_OF: &str = "rdfs:subClassOf";
pub const OWL_THING: &str = "owl:Thing";

#[derive(Debug, Error)]
pub enum KbError {
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("class hierarchy contains a cycle through {0}")]
    Cycle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The entity is the subject of the relation.
    Subject,
    /// The entity is the object of the relation.
    Object,
}

/// A KB relation and the word sequence of its local name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbRelation {
    pub iri: String,
    pub label_tokens: Vec<String>,
}

impl KbRelation {
    pub fn new(iri: &str) -> Self {
        let local = iri
            .rsplit([':', '/', '#'])
            .next()
            .unwrap_or(iri);
        let mut tokens = text::split_identifier(local);
        if tokens.is_empty() {
            tokens = vec![iri.to_lowercase()];
        }
        KbRelation {
            iri: iri.to_string(),
            label_tokens: tokens,
        }
    }
}

type TermId = u32;

#[derive(Debug, Default)]
pub struct KbStore {
    prefixes: Prefixes,
    terms: Vec<Term>,
    term_ids: HashMap<Term, TermId>,
    triple_count: usize,
    outgoing: HashMap<TermId, Vec<(TermId, TermId)>>,
    incoming: HashMap<TermId, Vec<(TermId, TermId)>>,
    by_relation: BTreeMap<TermId, Vec<(TermId, TermId)>>,
    in_degree: HashMap<TermId, usize>,
    types: BTreeMap<String, BTreeSet<String>>,
    labels: BTreeMap<String, Vec<String>>,
    label_index: HashMap<String, BTreeSet<String>>,
    parents: BTreeMap<String, BTreeSet<String>>,
    ancestors: HashMap<String, BTreeSet<String>>,
    warnings: Vec<String>,
}

/// Accumulates rows before indexing; [`KbBuilder::build`] is the only way to a store.
#[derive(Debug, Default)]
pub struct KbBuilder {
    prefixes: Prefixes,
    triples: BTreeSet<(Term, String, Term)>,
    types: BTreeMap<String, BTreeSet<String>>,
    labels: BTreeMap<String, Vec<String>>,
    parents: BTreeMap<String, BTreeSet<String>>,
    warnings: Vec<String>,
}

impl KbBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prefixes(&self) -> &Prefixes {
        &self.prefixes
    }

    /// Adds one fact. Schema predicates are routed to the typing, label and
    /// hierarchy tables.
    pub fn add(&mut self, subject: &str, relation: &str, object: Term) {
        match relation {
            RDF_TYPE => {
                if let Term::Iri(class) = object {
                    self.types.entry(subject.to_string()).or_default().insert(class);
                }
            }
            RDFS_LABEL => {
                let label = match object {
                    Term::Literal(l) => l.value,
                    Term::Iri(i) => i,
                };
                self.add_label(subject, &label);
            }
            RDFS_SUBCLASS_OF => {
                if let Term::Iri(sup) = object {
                    self.add_subclass(subject, &sup);
                }
            }
            _ => {
                self.triples
                    .insert((Term::Iri(subject.to_string()), relation.to_string(), object));
            }
        }
    }

    pub fn add_label(&mut self, iri: &str, label: &str) {
        let entry = self.labels.entry(iri.to_string()).or_default();
        if !entry.iter().any(|l| l == label) {
            entry.push(label.to_string());
        }
    }

    pub fn add_subclass(&mut self, sub: &str, sup: &str) {
        if sub != sup {
            self.parents.entry(sub.to_string()).or_default().insert(sup.to_string());
        }
    }

    pub fn read_triples(&mut self, path: &Path) -> Result<(), KbError> {
        let content = read(path)?;
        for (i, line) in content.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if line.trim_start().starts_with("@prefix") {
                self.prefixes
                    .declare_line(line)
                    .map_err(|m| malformed(path, line_no, m))?;
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(malformed(
                    path,
                    line_no,
                    format!("expected 3 tab-separated columns, found {}", cols.len()),
                ));
            }
            let subject = self
                .prefixes
                .parse_iri(cols[0])
                .map_err(|m| malformed(path, line_no, format!("subject: {m}")))?;
            let relation = self
                .prefixes
                .parse_iri(cols[1])
                .map_err(|m| malformed(path, line_no, format!("relation: {m}")))?;
            let object = self
                .prefixes
                .parse_term(cols[2])
                .map_err(|m| malformed(path, line_no, format!("object: {m}")))?;
            self.add(&subject, &relation, object);
        }
        Ok(())
    }

    pub fn read_labels(&mut self, path: &Path) -> Result<(), KbError> {
        let content = read(path)?;
        for (i, line) in content.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if line.trim_start().starts_with("@prefix") {
                self.prefixes
                    .declare_line(line)
                    .map_err(|m| malformed(path, line_no, m))?;
                continue;
            }
            let Some((iri, label)) = line.split_once('\t') else {
                return Err(malformed(path, line_no, "expected `iri <TAB> label`"));
            };
            let iri = self
                .prefixes
                .parse_iri(iri)
                .map_err(|m| malformed(path, line_no, m))?;
            let label = label.trim();
            let label = label
                .strip_prefix('"')
                .and_then(|l| l.strip_suffix('"'))
                .unwrap_or(label);
            self.add_label(&iri, label);
        }
        Ok(())
    }

    /// Rows whose IRIs cannot be resolved are skipped with a warning.
    pub fn read_hierarchy(&mut self, path: &Path) -> Result<(), KbError> {
        let content = read(path)?;
        for (i, line) in content.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if line.trim_start().starts_with("@prefix") {
                self.prefixes
                    .declare_line(line)
                    .map_err(|m| malformed(path, line_no, m))?;
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(malformed(path, line_no, "expected `subclass <TAB> superclass`"));
            }
            match (
                self.prefixes.parse_iri(cols[0]),
                self.prefixes.parse_iri(cols[1]),
            ) {
                (Ok(sub), Ok(sup)) => self.add_subclass(&sub, &sup),
                (Err(m), _) | (_, Err(m)) => {
                    let msg = format!("{}:{}: skipped hierarchy row: {m}", path.display(), line_no);
                    warn!("{msg}");
                    self.warnings.push(msg);
                }
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<KbStore, KbError> {
        let mut store = KbStore {
            prefixes: self.prefixes,
            warnings: self.warnings,
            types: self.types,
            parents: self.parents,
            ..KbStore::default()
        };
        store.ancestors = closure(&store.parents)?;
        for (subject, relation, object) in self.triples {
            let s = store.intern(subject);
            let r = store.intern(Term::Iri(relation));
            let o = store.intern(object);
            store.outgoing.entry(s).or_default().push((r, o));
            store.incoming.entry(o).or_default().push((r, s));
            store.by_relation.entry(r).or_default().push((s, o));
            *store.in_degree.entry(o).or_default() += 1;
            store.triple_count += 1;
        }
        for (iri, labels) in &self.labels {
            for label in labels {
                store
                    .label_index
                    .entry(text::fold(label))
                    .or_default()
                    .insert(iri.clone());
            }
        }
        store.labels = self.labels;
        Ok(store)
    }
}

fn read(path: &Path) -> Result<String, KbError> {
    fs::read_to_string(path).map_err(|source| KbError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> KbError {
    KbError::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reflexive-transitive superclass closure; fails on cycles.
fn closure(
    parents: &BTreeMap<String, BTreeSet<String>>,
) -> Result<HashMap<String, BTreeSet<String>>, KbError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        class: &str,
        parents: &BTreeMap<String, BTreeSet<String>>,
        marks: &mut HashMap<String, Mark>,
        out: &mut HashMap<String, BTreeSet<String>>,
    ) -> Result<(), KbError> {
        match marks.get(class) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(KbError::Cycle(class.to_string())),
            None => {}
        }
        marks.insert(class.to_string(), Mark::Active);
        let mut acc = BTreeSet::from([class.to_string()]);
        for p in parents.get(class).into_iter().flatten() {
            visit(p, parents, marks, out)?;
            acc.extend(out[p.as_str()].iter().cloned());
        }
        marks.insert(class.to_string(), Mark::Done);
        out.insert(class.to_string(), acc);
        Ok(())
    }
    let mut marks = HashMap::new();
    let mut out = HashMap::new();
    for class in parents.keys() {
        visit(class, parents, &mut marks, &mut out)?;
    }
    Ok(out)
}

impl KbStore {
    /// Loads the three KB files. The labels and hierarchy files are optional.
    pub fn load(
        triples: &Path,
        labels: Option<&Path>,
        hierarchy: Option<&Path>,
    ) -> Result<KbStore, KbError> {
        let mut b = KbBuilder::new();
        b.read_triples(triples)?;
        if let Some(p) = labels {
            b.read_labels(p)?;
        }
        if let Some(p) = hierarchy {
            b.read_hierarchy(p)?;
        }
        b.build()
    }

    fn intern(&mut self, t: Term) -> TermId {
        if let Some(&id) = self.term_ids.get(&t) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(t.clone());
        self.term_ids.insert(t, id);
        id
    }

    fn id_of(&self, token: &str) -> Option<TermId> {
        let term = self.prefixes.parse_term(token).ok()?;
        self.term_ids.get(&term).copied()
    }

    fn iri(&self, id: TermId) -> &str {
        match &self.terms[id as usize] {
            Term::Iri(i) => i,
            Term::Literal(l) => &l.value,
        }
    }

    pub fn prefixes(&self) -> &Prefixes {
        &self.prefixes
    }

    /// Canonical compact form of an IRI written either way.
    pub fn canonical_iri(&self, token: &str) -> String {
        self.prefixes
            .parse_iri(token)
            .unwrap_or_else(|_| token.trim().to_string())
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn triple_count(&self) -> usize {
        self.triple_count
    }

    pub fn is_empty(&self) -> bool {
        self.triple_count == 0
    }

    /// All relation IRIs with at least one triple, sorted.
    pub fn relations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .by_relation
            .keys()
            .map(|&r| self.iri(r).to_string())
            .collect();
        out.sort();
        out
    }

    /// `(subject, object)` pairs of a relation, objects rendered in their TSV token form.
    pub fn triples_of(&self, relation: &str) -> Vec<(String, String)> {
        let Some(r) = self.id_of(relation) else {
            return Vec::new();
        };
        self.by_relation
            .get(&r)
            .into_iter()
            .flatten()
            .map(|&(s, o)| (self.iri(s).to_string(), self.iri(o).to_string()))
            .collect()
    }

    pub fn term(&self, token: &str) -> Option<&Term> {
        self.id_of(token).map(|id| &self.terms[id as usize])
    }

    /// Relations `r` with `(s, r, o)` in the store.
    pub fn relations_between(&self, s: &str, o: &str) -> BTreeSet<String> {
        let (Some(s), Some(o)) = (self.id_of(s), self.id_of(o)) else {
            return BTreeSet::new();
        };
        self.outgoing
            .get(&s)
            .into_iter()
            .flatten()
            .filter(|&&(_, obj)| obj == o)
            .map(|&(r, _)| self.iri(r).to_string())
            .collect()
    }

    /// Relations where `e` sits at `direction`; with `endpoint_type`, the other
    /// endpoint must be compatible with it.
    pub fn relations_of(
        &self,
        e: &str,
        direction: Direction,
        endpoint_type: Option<&TypeRef>,
    ) -> BTreeSet<String> {
        let Some(id) = self.id_of(e) else {
            return BTreeSet::new();
        };
        let index = match direction {
            Direction::Subject => &self.outgoing,
            Direction::Object => &self.incoming,
        };
        index
            .get(&id)
            .into_iter()
            .flatten()
            .filter(|&&(_, other)| {
                endpoint_type.is_none_or(|t| self.term_is_compatible(other, t))
            })
            .map(|&(r, _)| self.iri(r).to_string())
            .collect()
    }

    /// Whether some triple of `relation` satisfies both endpoint predicates.
    pub fn any_triple(
        &self,
        relation: &str,
        mut subject: impl FnMut(&Term) -> bool,
        mut object: impl FnMut(&Term) -> bool,
    ) -> bool {
        let Some(r) = self.id_of(relation) else {
            return false;
        };
        self.by_relation.get(&r).into_iter().flatten().any(|&(s, o)| {
            subject(&self.terms[s as usize]) && object(&self.terms[o as usize])
        })
    }

    /// Number of triples with `e` as object. Literals count their occurrences.
    pub fn in_degree(&self, e: &str) -> usize {
        self.id_of(e)
            .and_then(|id| self.in_degree.get(&id).copied())
            .unwrap_or(0)
    }

    pub fn in_degree_sum(&self, s: &str, o: &str) -> usize {
        self.in_degree(s) + self.in_degree(o)
    }

    pub fn types_of(&self, entity: &str) -> BTreeSet<String> {
        self.types
            .get(&self.canonical_iri(entity))
            .cloned()
            .unwrap_or_default()
    }

    /// Reflexive-transitive superclasses of a class.
    pub fn superclasses(&self, class: &str) -> BTreeSet<String> {
        self.ancestors
            .get(class)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([class.to_string()]))
    }

    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.ancestors.get(sub).is_some_and(|a| a.contains(sup))
    }

    /// Every class mentioned by the hierarchy or used as an `rdf:type`.
    pub fn classes(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.ancestors.values().flatten().cloned().collect();
        out.extend(self.types.values().flatten().cloned());
        out
    }

    pub fn is_class(&self, iri: &str) -> bool {
        self.ancestors.contains_key(iri)
            || self.ancestors.values().any(|a| a.contains(iri))
            || self.types.values().any(|t| t.contains(iri))
    }

    /// Roots of the class hierarchy (classes without superclasses), sorted.
    pub fn hierarchy_roots(&self) -> Vec<String> {
        self.classes()
            .into_iter()
            .filter(|c| self.parents.get(c).is_none_or(|p| p.is_empty()))
            .collect()
    }

    /// The deepest type of a term: the datatype for literals, otherwise the
    /// `rdf:type` with the most ancestors (ties broken by IRI).
    pub fn most_specific_type(&self, token: &str) -> Option<TypeRef> {
        match self.prefixes.parse_term(token).ok()? {
            Term::Literal(l) => Some(TypeRef::Datatype(l.datatype)),
            Term::Iri(iri) => self
                .types
                .get(&iri)?
                .iter()
                .max_by(|a, b| {
                    self.superclasses(a)
                        .len()
                        .cmp(&self.superclasses(b).len())
                        .then_with(|| b.cmp(a))
                })
                .map(|c| TypeRef::Class(c.clone())),
        }
    }

    /// True iff the entity's type (or the class itself) is the constraint or one
    /// of its subclasses. Literals compare by datatype. `owl:Thing` admits any IRI.
    pub fn is_compatible_type(&self, entity_or_class: &str, constraint: &TypeRef) -> bool {
        match self.prefixes.parse_term(entity_or_class) {
            Ok(t) => self.is_term_compatible(&t, constraint),
            Err(_) => false,
        }
    }

    pub fn is_term_compatible(&self, term: &Term, constraint: &TypeRef) -> bool {
        match (term, constraint) {
            (Term::Literal(l), TypeRef::Datatype(d)) => l.datatype == *d,
            (Term::Literal(_), TypeRef::Class(_)) | (Term::Iri(_), TypeRef::Datatype(_)) => false,
            (Term::Iri(iri), TypeRef::Class(c)) => {
                if c == OWL_THING {
                    return true;
                }
                match self.types.get(iri) {
                    Some(types) if !types.is_empty() => {
                        types.iter().any(|t| self.is_subclass_of(t, c))
                    }
                    _ => self.is_subclass_of(iri, c),
                }
            }
        }
    }

    fn term_is_compatible(&self, id: TermId, constraint: &TypeRef) -> bool {
        self.is_term_compatible(&self.terms[id as usize], constraint)
    }

    pub fn labels_of(&self, iri: &str) -> &[String] {
        self.labels
            .get(&self.canonical_iri(iri))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// IRIs whose label equals `label` after case and diacritic folding.
    pub fn lookup_label(&self, label: &str) -> BTreeSet<String> {
        self.label_index
            .get(&text::fold(label))
            .cloned()
            .unwrap_or_default()
    }

    /// Classes matching `label` by an explicit label or by their local name
    /// (`dbo:SoccerPlayer` answers to "soccer player").
    pub fn classes_with_label(&self, label: &str) -> Vec<String> {
        let folded = text::fold(label);
        if folded.is_empty() {
            return Vec::new();
        }
        let classes = self.classes();
        let mut out: Vec<String> = self
            .lookup_label(label)
            .into_iter()
            .filter(|c| classes.contains(c))
            .collect();
        for c in &classes {
            let local = KbRelation::new(c).label_tokens.join(" ");
            if local == folded && !out.contains(c) {
                out.push(c.clone());
            }
        }
        out.sort();
        out
    }

    /// Entities (non-classes) whose label matches exactly, case-insensitively.
    pub fn entities_with_label(&self, label: &str) -> Vec<String> {
        let classes = self.classes();
        self.lookup_label(label)
            .into_iter()
            .filter(|e| !classes.contains(e))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    fn toy() -> (tempfile::TempDir, KbStore) {
        let dir = tempfile::tempdir().unwrap();
        let kb = write(
            dir.path(),
            "kb.tsv",
            "@prefix ex: <http://example.org/>\n\
             # comment\n\
             dbr:Nikola_Tesla\tdbo:birthPlace\tdbr:Smiljan\n\
             dbr:Nikola_Tesla\tdbo:deathPlace\tdbr:Smiljan\n\
             <http://dbpedia.org/resource/Duka_Tesla>\tdbo:child\tdbr:Nikola_Tesla\n\
             dbr:Seth_MacFarlane\tdbo:creator\tdbr:Family_Guy\n\
             dbr:Family_Guy\tex:airDate\t1999-01-31\n\
             dbr:Microsoft\tdbo:foundingYear\t1975\n\
             dbr:Nikola_Tesla\trdf:type\tdbo:Scientist\n\
             dbr:Seth_MacFarlane\trdf:type\tdbo:Actor\n\
             dbr:Family_Guy\trdf:type\tdbo:TelevisionShow\n\
             dbr:Smiljan\trdfs:label\t\"Smiljan\"\n",
        );
        let labels = write(
            dir.path(),
            "labels.tsv",
            "dbr:Nikola_Tesla\tNikola Tesla\ndbo:Film\tmovie\ndbr:Skype\tSkype\n",
        );
        let hier = write(
            dir.path(),
            "hierarchy.tsv",
            "dbo:Actor\tdbo:Person\ndbo:Scientist\tdbo:Person\ndbo:Person\towl:Thing\n\
             dbo:Film\towl:Thing\nnope:Thing\towl:Thing\ndbo:TelevisionShow\towl:Thing\n",
        );
        let store = KbStore::load(&kb, Some(&labels), Some(&hier)).unwrap();
        (dir, store)
    }

    #[test]
    fn relations_between_is_directional() {
        let (_d, kb) = toy();
        assert_eq!(
            kb.relations_between("dbr:Nikola_Tesla", "dbr:Smiljan"),
            BTreeSet::from(["dbo:birthPlace".to_string(), "dbo:deathPlace".to_string()])
        );
        assert!(kb.relations_between("dbr:Smiljan", "dbr:Nikola_Tesla").is_empty());
        assert!(kb.relations_between("dbr:Nobody", "dbr:Nowhere").is_empty());
        // full IRIs resolve to the same key
        assert_eq!(
            kb.relations_between(
                "<http://dbpedia.org/resource/Nikola_Tesla>",
                "http://dbpedia.org/resource/Smiljan"
            )
            .len(),
            2
        );
    }

    #[test]
    fn relations_of_respects_endpoint_type() {
        let (_d, kb) = toy();
        let person = TypeRef::Class("dbo:Person".into());
        assert_eq!(
            kb.relations_of("dbr:Family_Guy", Direction::Object, Some(&person)),
            BTreeSet::from(["dbo:creator".to_string()])
        );
        let film = TypeRef::Class("dbo:Film".into());
        assert!(kb
            .relations_of("dbr:Family_Guy", Direction::Object, Some(&film))
            .is_empty());
        assert!(kb
            .relations_of("dbr:Smiljan", Direction::Subject, None)
            .is_empty());
        assert_eq!(
            kb.relations_of("dbr:Family_Guy", Direction::Subject, Some(&TypeRef::Datatype(Datatype::Date))),
            BTreeSet::from(["ex:airDate".to_string()])
        );
    }

    #[test]
    fn in_degrees() {
        let (_d, kb) = toy();
        assert_eq!(kb.in_degree("dbr:Smiljan"), 2);
        assert_eq!(kb.in_degree("dbr:Nikola_Tesla"), 1);
        assert_eq!(kb.in_degree_sum("dbr:Nikola_Tesla", "dbr:Smiljan"), 3);
        assert_eq!(kb.in_degree_sum("dbr:Smiljan", "dbr:Smiljan"), 4);
        assert_eq!(kb.in_degree_sum("dbr:A", "dbr:B"), 0);
        assert_eq!(kb.in_degree("1975"), 1);
    }

    #[test]
    fn type_compatibility() {
        let (_d, kb) = toy();
        let person = TypeRef::Class("dbo:Person".into());
        assert!(kb.is_compatible_type("dbo:Actor", &person));
        assert!(kb.is_compatible_type("dbr:Seth_MacFarlane", &person));
        assert!(!kb.is_compatible_type("dbr:Family_Guy", &person));
        assert!(!kb.is_compatible_type("1999-01-31", &TypeRef::Datatype(Datatype::Number)));
        assert!(kb.is_compatible_type("1999-01-31", &TypeRef::Datatype(Datatype::Date)));
        assert!(kb.is_compatible_type("dbr:Family_Guy", &TypeRef::Class(OWL_THING.into())));
        assert_eq!(
            kb.most_specific_type("dbr:Seth_MacFarlane"),
            Some(TypeRef::Class("dbo:Actor".into()))
        );
        assert_eq!(
            kb.most_specific_type("1975"),
            Some(TypeRef::Datatype(Datatype::Number))
        );
    }

    #[test]
    fn schema_rows_and_warnings() {
        let (_d, kb) = toy();
        assert_eq!(kb.triple_count(), 6);
        assert!(!kb.relations().contains(&RDF_TYPE.to_string()));
        assert_eq!(kb.labels_of("dbr:Smiljan"), ["Smiljan".to_string()]);
        assert_eq!(kb.warnings().len(), 1);
        assert_eq!(kb.hierarchy_roots(), vec![OWL_THING.to_string()]);
        assert_eq!(kb.classes_with_label("movie"), vec!["dbo:Film".to_string()]);
        assert_eq!(kb.classes_with_label("Film"), vec!["dbo:Film".to_string()]);
        assert_eq!(kb.entities_with_label("skype"), vec!["dbr:Skype".to_string()]);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let kb = write(dir.path(), "kb.tsv", "dbr:A\tdbo:r\tdbr:B\ndbr:A\tdbo:r\n");
        match KbStore::load(&kb, None, None) {
            Err(KbError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let kb = write(dir.path(), "kb2.tsv", "\"lit\"\tdbo:r\tdbr:B\n");
        assert!(matches!(
            KbStore::load(&kb, None, None),
            Err(KbError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn empty_store() {
        let dir = tempfile::tempdir().unwrap();
        let kb = write(dir.path(), "kb.tsv", "");
        let store = KbStore::load(&kb, None, None).unwrap();
        assert!(store.is_empty());
        assert!(store.relations().is_empty());
        assert!(store.relations_of("dbr:A", Direction::Subject, None).is_empty());
        assert_eq!(store.in_degree_sum("dbr:A", "dbr:A"), 0);
    }

    #[test]
    fn hierarchy_cycles_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let kb = write(dir.path(), "kb.tsv", "");
        let h = write(dir.path(), "h.tsv", "dbo:A\tdbo:B\ndbo:B\tdbo:C\ndbo:C\tdbo:A\n");
        assert!(matches!(
            KbStore::load(&kb, None, Some(&h)),
            Err(KbError::Cycle(_))
        ));
    }

    #[test]
    fn relation_label_tokens() {
        assert_eq!(KbRelation::new("dbo:deathPlace").label_tokens, vec!["death", "place"]);
        assert_eq!(
            KbRelation::new("http://dbpedia.org/property/placeOfBirth").label_tokens,
            vec!["place", "of", "birth"]
        );
    }
}
