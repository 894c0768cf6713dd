//! Binary AMR triples from n-ary frames.
//!
//! Every ordered pair of distinct role fillers of a frame becomes one triple whose
//! predicate is `<frame>.<subject-role>.<object-role>`, e.g. `bear-02.arg1.location`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::amr::{AmrGraph, FrameInstance, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed AMR predicate `{0}`: expected <frame>.<subject-role>.<object-role>")]
pub struct PredicateError(pub String);

/// `frame.subjectRole.objectRole` with a canonical lower-case rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmrPredicate {
    pub frame: String,
    pub subject_role: String,
    pub object_role: String,
}

impl AmrPredicate {
    pub fn new(frame: &str, subject_role: &str, object_role: &str) -> Self {
        AmrPredicate {
            frame: frame.to_ascii_lowercase(),
            subject_role: subject_role.to_ascii_lowercase(),
            object_role: object_role.to_ascii_lowercase(),
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }

    pub fn reversed(&self) -> Self {
        AmrPredicate {
            frame: self.frame.clone(),
            subject_role: self.object_role.clone(),
            object_role: self.subject_role.clone(),
        }
    }
}

impl fmt::Display for AmrPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.frame, self.subject_role, self.object_role)
    }
}

impl FromStr for AmrPredicate {
    type Err = PredicateError;

    /// Accepts both `bear-02.arg0.arg1` and the hyphen-free `bear02.arg0.arg1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split('.').collect();
        let [frame, subj, obj] = parts[..] else {
            return Err(PredicateError(s.to_string()));
        };
        if frame.is_empty() || subj.is_empty() || obj.is_empty() {
            return Err(PredicateError(s.to_string()));
        }
        let bytes = frame.as_bytes();
        let frame = if bytes.len() > 2
            && bytes[bytes.len() - 2..].iter().all(u8::is_ascii_digit)
            && bytes[bytes.len() - 3].is_ascii_alphabetic()
        {
            format!("{}-{}", &frame[..frame.len() - 2], &frame[frame.len() - 2..])
        } else {
            frame.to_string()
        };
        Ok(AmrPredicate::new(&frame, subj, obj))
    }
}

impl Serialize for AmrPredicate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for AmrPredicate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One endpoint of an AMR triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleEnd {
    pub node: NodeId,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmrTriple {
    pub subject: TripleEnd,
    pub predicate: AmrPredicate,
    pub object: TripleEnd,
}

impl AmrTriple {
    pub fn reversed(&self) -> AmrTriple {
        AmrTriple {
            subject: self.object.clone(),
            predicate: self.predicate.reversed(),
            object: self.subject.clone(),
        }
    }

    /// `subject_surface \t predicate \t object_surface \t subject_node \t object_node`
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.subject.surface,
            self.predicate,
            self.object.surface,
            self.subject.node,
            self.object.node
        )
    }
}

impl fmt::Display for AmrTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.subject.surface, self.predicate, self.object.surface
        )
    }
}

/// All ordered pairs of distinct fillers: `n * (n - 1)` triples for `n` fillers.
/// Fillers are ordered by role name first so the output is stable.
pub fn expand_frame(graph: &AmrGraph, frame: &FrameInstance) -> Vec<AmrTriple> {
    let mut fillers = frame.fillers.clone();
    fillers.sort();
    let mut out = Vec::with_capacity(fillers.len() * fillers.len().saturating_sub(1));
    for (i, (subj_role, subj)) in fillers.iter().enumerate() {
        for (j, (obj_role, obj)) in fillers.iter().enumerate() {
            if i == j || subj == obj {
                continue;
            }
            out.push(AmrTriple {
                subject: TripleEnd {
                    node: *subj,
                    surface: graph.label(*subj),
                },
                predicate: AmrPredicate::new(&frame.frame, subj_role, obj_role),
                object: TripleEnd {
                    node: *obj,
                    surface: graph.label(*obj),
                },
            });
        }
    }
    out
}

/// Expansion of every frame in document order, deduplicated on
/// `(subject node, predicate, object node)`.
pub fn decompose(graph: &AmrGraph) -> Vec<AmrTriple> {
    let mut seen = HashSet::new();
    graph
        .frames()
        .iter()
        .flat_map(|f| expand_frame(graph, f))
        .filter(|t| seen.insert((t.subject.node, t.predicate.clone(), t.object.node)))
        .collect()
}
