//! PENMAN parsing and the normalized AMR graph.
//!
//! Parsing happens in two passes: a recursive-descent pass builds a plain tree of
//! `(var / concept :role value ...)` forms, and a second pass resolves variable
//! re-entrancies, reverses `-of` roles and collapses `:name` sub-graphs into the
//! entity node that owns them.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

/// Concept used by AMR for the answer placeholder of a question.
pub const UNKNOWN_CONCEPT: &str = "amr-unknown";

/// Roles that end in `-of` but are not inverses.
const NON_INVERTED_OF: &[&str] = &["consist-of", "prep-out-of", "prep-on-behalf-of"];

/// Roles that never carry a relation argument.
const NON_ARGUMENT_ROLES: &[&str] = &["name", "wiki", "polarity", "mode", "polite"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("PENMAN parse error at offset {offset} near `{token}`: {message}")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has {0} `amr-unknown` nodes, expected at most one")]
    AmbiguousUnknown(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A span of the source sentence, in char offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// A `(var / concept ...)` instance.
    Instance,
    /// An attribute value such as `1856`, `-` or `"Smiljan"`.
    Constant { quoted: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmrNode {
    pub id: NodeId,
    pub var: Option<String>,
    pub concept: String,
    pub kind: NodeKind,
    /// `:opN` strings of a collapsed `:name` sub-graph, in `N` order.
    pub name: Vec<String>,
    /// Token indices from `~e.N` alignment markers, if the input had any.
    pub alignment: Vec<usize>,
    pub span: Option<Span>,
}

impl AmrNode {
    pub fn is_frame(&self) -> bool {
        self.kind == NodeKind::Instance && is_frame_concept(&self.concept)
    }

    pub fn is_unknown(&self) -> bool {
        self.kind == NodeKind::Instance && self.concept == UNKNOWN_CONCEPT
    }

    pub fn is_named(&self) -> bool {
        !self.name.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, NodeKind::Constant { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrEdge {
    pub source: NodeId,
    pub target: NodeId,
    pub role: String,
}

/// A frame node and the direct role fillers hanging off it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameInstance {
    pub frame_node: NodeId,
    pub frame: String,
    pub fillers: Vec<(String, NodeId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmrGraph {
    nodes: Vec<AmrNode>,
    edges: Vec<AmrEdge>,
    root: NodeId,
}

/// `true` for PropBank-style senses such as `bear-02` or `have-rel-role-91`.
pub fn is_frame_concept(concept: &str) -> bool {
    let Some((lemma, sense)) = concept.rsplit_once('-') else {
        return false;
    };
    sense.len() == 2
        && sense.bytes().all(|b| b.is_ascii_digit())
        && lemma.starts_with(|c: char| c.is_alphabetic())
        && lemma.chars().all(|c| c.is_alphabetic() || c == '-')
}

/// The lemma of a frame concept (`produce-01` -> `produce`); other concepts unchanged.
pub fn frame_lemma(concept: &str) -> &str {
    if is_frame_concept(concept) {
        &concept[..concept.len() - 3]
    } else {
        concept
    }
}

/// Upper-case `ARGn` core roles, lower-case everything else.
pub fn normalize_role(role: &str) -> String {
    let lower = role.to_ascii_lowercase();
    match lower.strip_prefix("arg") {
        Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => {
            format!("ARG{rest}")
        }
        _ => lower,
    }
}

/// Parses one PENMAN graph. Spans stay empty; see [`AmrGraph::parse_with_text`].
pub fn parse_penman(text: &str) -> Result<AmrGraph, ParseError> {
    let tree = TreeParser::new(text).parse_top()?;
    GraphBuilder::default().build(tree)
}

/// One record of a multi-graph PENMAN file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenmanRecord {
    /// `# ::key value` metadata lines, e.g. `snt`.
    pub metadata: BTreeMap<String, String>,
    pub penman: String,
}

/// Splits a multi-graph file on blank lines. Comment lines are kept as metadata
/// only when they use the `# ::key value` convention.
pub fn split_records(input: &str) -> Vec<PenmanRecord> {
    let mut records = Vec::new();
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    let mut flush = |meta: &mut BTreeMap<String, String>, body: &mut String| {
        if !body.trim().is_empty() {
            records.push(PenmanRecord {
                metadata: std::mem::take(meta),
                penman: std::mem::take(body).trim().to_string(),
            });
        } else {
            meta.clear();
            body.clear();
        }
    };
    for line in input.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut meta, &mut body);
        } else if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim_start();
            if comment.starts_with("::") {
                for part in comment.split("::").map(str::trim).filter(|p| !p.is_empty()) {
                    let (k, v) = part.split_once(' ').unwrap_or((part, ""));
                    meta.insert(k.to_string(), v.trim().to_string());
                }
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    flush(&mut meta, &mut body);
    records
}

impl AmrGraph {
    /// Parses `penman` and attaches source spans against `sentence`.
    ///
    /// Nodes carrying `~e.N` markers get the span of their tokens. Otherwise the
    /// node's surface string is searched case-insensitively in the sentence; the
    /// match must start at a word boundary and is widened to the end of its word
    /// (`movie` matches `movies`). Multi-word names fall back to their longest
    /// matching contiguous word run. Unmatched nodes get no span.
    pub fn parse_with_text(penman: &str, sentence: &str) -> Result<AmrGraph, ParseError> {
        let mut g = parse_penman(penman)?;
        g.attach_spans(sentence);
        Ok(g)
    }

    pub fn nodes(&self) -> &[AmrNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[AmrEdge] {
        &self.edges
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &AmrNode {
        &self.nodes[id.0]
    }

    pub fn node_by_var(&self, var: &str) -> Option<&AmrNode> {
        self.nodes.iter().find(|n| n.var.as_deref() == Some(var))
    }

    pub fn outgoing(&self, id: NodeId) -> impl Iterator<Item = &AmrEdge> {
        self.edges.iter().filter(move |e| e.source == id)
    }

    /// Human-readable surface of a node: the joined name for named entities,
    /// `YYYY[-MM[-DD]]` for `date-entity`, the lemma for frames, else the concept.
    pub fn label(&self, id: NodeId) -> String {
        let node = self.node(id);
        if node.is_named() {
            return node.name.join(" ");
        }
        if node.is_constant() {
            return node.concept.clone();
        }
        if node.concept == "date-entity" {
            let part = |role: &str| {
                self.outgoing(id)
                    .find(|e| e.role == role)
                    .map(|e| self.node(e.target).concept.clone())
            };
            let mut out = String::new();
            if let Some(y) = part("year") {
                out.push_str(&y);
                if let Some(m) = part("month") {
                    out.push_str(&format!("-{:0>2}", m));
                    if let Some(d) = part("day") {
                        out.push_str(&format!("-{:0>2}", d));
                    }
                }
                return out;
            }
        }
        frame_lemma(&node.concept).to_string()
    }

    /// One instance per frame node, in document order.
    pub fn frames(&self) -> Vec<FrameInstance> {
        self.nodes
            .iter()
            .filter(|n| n.is_frame())
            .map(|n| {
                let mut fillers: Vec<(String, NodeId)> = Vec::new();
                for e in self.outgoing(n.id) {
                    if NON_ARGUMENT_ROLES.contains(&e.role.as_str()) || e.target == n.id {
                        continue;
                    }
                    let pair = (e.role.clone(), e.target);
                    if !fillers.contains(&pair) {
                        fillers.push(pair);
                    }
                }
                FrameInstance {
                    frame_node: n.id,
                    frame: n.concept.clone(),
                    fillers,
                }
            })
            .collect()
    }

    pub fn unknown_node(&self) -> Result<Option<NodeId>, GraphError> {
        let unknown: Vec<_> = self.nodes.iter().filter(|n| n.is_unknown()).collect();
        match unknown.len() {
            0 => Ok(None),
            1 => Ok(Some(unknown[0].id)),
            n => Err(GraphError::AmbiguousUnknown(n)),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over the normalized edge directions.
        let mut indeg = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            indeg[e.target.0] += 1;
        }
        let mut queue: Vec<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for e in self.edges.iter().filter(|e| e.source.0 == i) {
                indeg[e.target.0] -= 1;
                if indeg[e.target.0] == 0 {
                    queue.push(e.target.0);
                }
            }
        }
        seen == self.nodes.len()
    }

    /// Structural equality with variables as node identity; constants compare by
    /// value. Graphs produced by [`AmrGraph::to_penman`] keep their variables, so
    /// this is the round-trip check.
    pub fn structurally_eq(&self, other: &AmrGraph) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    fn canonical_form(&self) -> (String, BTreeSet<String>, Vec<String>) {
        let key = |id: NodeId| {
            let n = self.node(id);
            match &n.var {
                Some(v) => v.clone(),
                None => format!("\"{}\"", n.concept),
            }
        };
        let instances = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Instance)
            .map(|n| format!("{} / {} {:?}", key(n.id), n.concept, n.name))
            .collect();
        let mut edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{} :{} {}", key(e.source), e.role, key(e.target)))
            .collect();
        edges.sort();
        (key(self.root), instances, edges)
    }

    /// Serializes back to PENMAN, re-inverting edges that point into already
    /// reached nodes so every edge is printed exactly once.
    pub fn to_penman(&self) -> String {
        let vars: HashSet<&str> = self.nodes.iter().filter_map(|n| n.var.as_deref()).collect();
        let mut name_counter = 0usize;
        let mut fresh_name_var = || loop {
            name_counter += 1;
            let v = format!("nm{name_counter}");
            if !vars.contains(v.as_str()) {
                return v;
            }
        };
        let mut out = String::new();
        let mut visited = vec![false; self.nodes.len()];
        let mut emitted = vec![false; self.edges.len()];
        self.write_node(
            self.root,
            0,
            &mut out,
            &mut visited,
            &mut emitted,
            &mut fresh_name_var,
        );
        out
    }

    fn write_node(
        &self,
        id: NodeId,
        depth: usize,
        out: &mut String,
        visited: &mut [bool],
        emitted: &mut [bool],
        fresh: &mut dyn FnMut() -> String,
    ) {
        let node = self.node(id);
        visited[id.0] = true;
        out.push('(');
        out.push_str(node.var.as_deref().unwrap_or("_"));
        out.push_str(" / ");
        out.push_str(&node.concept);
        let indent = "    ".repeat(depth + 1);
        if node.is_named() {
            out.push_str(&format!("\n{indent}:name ({} / name", fresh()));
            for (i, op) in node.name.iter().enumerate() {
                out.push_str(&format!(" :op{} {}", i + 1, quote(op)));
            }
            out.push(')');
        }
        for (i, e) in self.edges.iter().enumerate() {
            if emitted[i] || (e.source != id && e.target != id) {
                continue;
            }
            emitted[i] = true;
            let (role, other) = if e.source == id {
                (e.role.clone(), e.target)
            } else {
                (format!("{}-of", e.role), e.source)
            };
            out.push_str(&format!("\n{indent}:{role} "));
            let other_node = self.node(other);
            match other_node.kind {
                NodeKind::Constant { quoted } => {
                    if quoted {
                        out.push_str(&quote(&other_node.concept));
                    } else {
                        out.push_str(&other_node.concept);
                    }
                }
                NodeKind::Instance if visited[other.0] => {
                    out.push_str(other_node.var.as_deref().unwrap_or("_"));
                }
                NodeKind::Instance => {
                    self.write_node(other, depth + 1, out, visited, emitted, fresh);
                }
            }
        }
        out.push(')');
    }

    fn attach_spans(&mut self, sentence: &str) {
        let tokens = text::tokenize(sentence);
        let chars: Vec<char> = sentence.chars().collect();
        let spans: Vec<Option<Span>> = (0..self.nodes.len())
            .map(|i| {
                let node = &self.nodes[i];
                if node.is_unknown() {
                    return None;
                }
                if !node.alignment.is_empty() {
                    let toks: Vec<_> = node
                        .alignment
                        .iter()
                        .filter_map(|&t| tokens.get(t))
                        .collect();
                    let start = toks.iter().map(|t| t.start).min()?;
                    let end = toks.iter().map(|t| t.end).max()?;
                    return Some(Span {
                        start,
                        end,
                        text: chars[start..end].iter().collect(),
                    });
                }
                let label = self.label(NodeId(i));
                let candidates: Vec<String> = if node.is_named() {
                    word_runs(&node.name)
                } else {
                    vec![label.replace('-', " ")]
                };
                candidates
                    .iter()
                    .find_map(|c| find_word_prefix(&chars, c))
                    .map(|(start, end)| Span {
                        start,
                        end,
                        text: chars[start..end].iter().collect(),
                    })
            })
            .collect();
        for (node, span) in self.nodes.iter_mut().zip(spans) {
            node.span = span;
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// All contiguous runs of `words`, longest first, then leftmost first.
fn word_runs(words: &[String]) -> Vec<String> {
    let n = words.len();
    let mut out = Vec::new();
    for len in (1..=n).rev() {
        for start in 0..=n - len {
            out.push(words[start..start + len].join(" "));
        }
    }
    out
}

fn find_word_prefix(chars: &[char], needle: &str) -> Option<(usize, usize)> {
    let needle: Vec<char> = needle.chars().map(lower_char).collect();
    if needle.is_empty() || needle.len() > chars.len() {
        return None;
    }
    let hay: Vec<char> = chars.iter().map(|&c| lower_char(c)).collect();
    (0..=hay.len() - needle.len()).find_map(|i| {
        let at_boundary = i == 0 || !hay[i - 1].is_alphanumeric();
        if at_boundary && hay[i..i + needle.len()] == needle[..] {
            let mut end = i + needle.len();
            while end < hay.len() && hay[end].is_alphanumeric() {
                end += 1;
            }
            Some((i, end))
        } else {
            None
        }
    })
}

fn lower_char(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_penman())
    }
}

// ---------------------------------------------------------------------------
// Tree pass
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct TreeNode {
    var: String,
    var_offset: usize,
    concept: String,
    alignment: Vec<usize>,
    children: Vec<(String, usize, TreeValue)>,
}

#[derive(Debug)]
enum TreeValue {
    Node(TreeNode),
    Atom {
        text: String,
        quoted: bool,
        offset: usize,
        alignment: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Str(String),
    Sym(String),
    Align(Vec<usize>),
}

struct TreeParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    lex_error: Option<ParseError>,
    len: usize,
}

impl TreeParser {
    fn new(input: &str) -> Self {
        let mut p = TreeParser {
            toks: Vec::new(),
            pos: 0,
            lex_error: None,
            len: input.chars().count(),
        };
        match lex(input) {
            Ok(t) => p.toks = t,
            Err(e) => p.lex_error = Some(e),
        }
        p
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (token, offset) = match self.toks.get(self.pos) {
            Some((t, off)) => (tok_text(t), *off),
            None => ("<end of input>".to_string(), self.len),
        };
        ParseError {
            message: message.into(),
            token,
            offset,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.len)
    }

    fn parse_top(mut self) -> Result<TreeNode, ParseError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        if self.peek() != Some(&Tok::Open) {
            return Err(self.err("expected `(` at start of graph"));
        }
        let node = self.parse_node()?;
        if self.pos < self.toks.len() {
            return Err(self.err("unexpected trailing input after graph"));
        }
        Ok(node)
    }

    fn take_alignment(&mut self) -> Vec<usize> {
        if let Some(Tok::Align(a)) = self.peek() {
            let a = a.clone();
            self.pos += 1;
            a
        } else {
            Vec::new()
        }
    }

    fn parse_node(&mut self) -> Result<TreeNode, ParseError> {
        match self.next() {
            Some(Tok::Open) => {}
            _ => {
                self.pos -= 1;
                return Err(self.err("expected `(`"));
            }
        }
        let var_offset = self.offset();
        let var = match self.next() {
            Some(Tok::Sym(v)) => v,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a variable after `(`"));
            }
        };
        if self.next() != Some(Tok::Slash) {
            self.pos -= 1;
            return Err(self.err(format!("expected `/` after variable `{var}`")));
        }
        let concept = match self.next() {
            Some(Tok::Sym(c)) => c,
            Some(Tok::Str(c)) => c,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a concept after `/`"));
            }
        };
        let alignment = self.take_alignment();
        let mut children = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Close) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Role(_)) => {
                    let role_offset = self.offset();
                    let Some(Tok::Role(role)) = self.next() else {
                        unreachable!()
                    };
                    let value = match self.peek() {
                        Some(Tok::Open) => TreeValue::Node(self.parse_node()?),
                        Some(Tok::Sym(_)) | Some(Tok::Str(_)) => {
                            let offset = self.offset();
                            let (text, quoted) = match self.next() {
                                Some(Tok::Sym(s)) => (s, false),
                                Some(Tok::Str(s)) => (s, true),
                                _ => unreachable!(),
                            };
                            let alignment = self.take_alignment();
                            TreeValue::Atom {
                                text,
                                quoted,
                                offset,
                                alignment,
                            }
                        }
                        _ => return Err(self.err(format!("missing value for role `:{role}`"))),
                    };
                    children.push((role, role_offset, value));
                }
                None => return Err(self.err("unbalanced parentheses: missing `)`")),
                _ => return Err(self.err("expected a role or `)`")),
            }
        }
        Ok(TreeNode {
            var,
            var_offset,
            concept,
            alignment,
            children,
        })
    }
}

fn tok_text(t: &Tok) -> String {
    match t {
        Tok::Open => "(".into(),
        Tok::Close => ")".into(),
        Tok::Slash => "/".into(),
        Tok::Role(r) => format!(":{r}"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => s.clone(),
        Tok::Align(a) => format!("~e.{a:?}"),
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let is_delim = |c: char| c.is_whitespace() || c == '(' || c == ')' || c == '~';
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::Open, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::Close, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '"' => {
                let start = i;
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(ParseError {
                                message: "unterminated string".into(),
                                token: chars[start..].iter().collect(),
                                offset: start,
                            })
                        }
                        Some('\\') => {
                            if let Some(&n) = chars.get(i + 1) {
                                s.push(n);
                            }
                            i += 2;
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), start));
            }
            '~' => {
                let start = i;
                i += 1;
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != ')' {
                    i += 1;
                }
                let raw: String = chars[start + 1..i].iter().collect();
                let digits = raw.rsplit('.').next().unwrap_or("");
                let idx: Result<Vec<usize>, _> = digits.split(',').map(str::parse).collect();
                match idx {
                    Ok(v) => out.push((Tok::Align(v), start)),
                    Err(_) => {
                        return Err(ParseError {
                            message: "malformed alignment marker".into(),
                            token: format!("~{raw}"),
                            offset: start,
                        })
                    }
                }
            }
            ':' => {
                let start = i;
                i += 1;
                while i < chars.len() && !is_delim(chars[i]) && chars[i] != '"' {
                    i += 1;
                }
                let role: String = chars[start + 1..i].iter().collect();
                if role.is_empty() {
                    return Err(ParseError {
                        message: "empty role name".into(),
                        token: ":".into(),
                        offset: start,
                    });
                }
                out.push((Tok::Role(role), start));
            }
            _ => {
                let start = i;
                while i < chars.len() && !is_delim(chars[i]) && chars[i] != '"' {
                    i += 1;
                }
                out.push((Tok::Sym(chars[start..i].iter().collect()), start));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Graph pass
// ---------------------------------------------------------------------------

#[derive(Default)]
struct GraphBuilder {
    nodes: Vec<AmrNode>,
    edges: Vec<AmrEdge>,
    vars: HashMap<String, NodeId>,
}

fn looks_like_variable(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_digit())
}

impl GraphBuilder {
    fn build(mut self, tree: TreeNode) -> Result<AmrGraph, ParseError> {
        self.define(&tree)?;
        self.link(&tree)?;
        Ok(AmrGraph {
            nodes: self.nodes,
            edges: self.edges,
            root: NodeId(0),
        })
    }

    /// Allocates instance nodes in document order, rejecting duplicate variables.
    fn define(&mut self, node: &TreeNode) -> Result<NodeId, ParseError> {
        if self.vars.contains_key(&node.var) {
            return Err(ParseError {
                message: "duplicate node definition".into(),
                token: node.var.clone(),
                offset: node.var_offset,
            });
        }
        let id = NodeId(self.nodes.len());
        self.vars.insert(node.var.clone(), id);
        self.nodes.push(AmrNode {
            id,
            var: Some(node.var.clone()),
            concept: node.concept.clone(),
            kind: NodeKind::Instance,
            name: Vec::new(),
            alignment: node.alignment.clone(),
            span: None,
        });
        for (role, _, value) in &node.children {
            if let TreeValue::Node(child) = value {
                if role.eq_ignore_ascii_case("name") && child.concept == "name" {
                    // Collapsed into the parent; references to its variable resolve
                    // to the parent entity.
                    if self.vars.insert(child.var.clone(), id).is_some() {
                        return Err(ParseError {
                            message: "duplicate node definition".into(),
                            token: child.var.clone(),
                            offset: child.var_offset,
                        });
                    }
                    continue;
                }
                self.define(child)?;
            }
        }
        Ok(id)
    }

    fn constant(&mut self, text: &str, quoted: bool, alignment: &[usize]) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(AmrNode {
            id,
            var: None,
            concept: text.to_string(),
            kind: NodeKind::Constant { quoted },
            name: Vec::new(),
            alignment: alignment.to_vec(),
            span: None,
        });
        id
    }

    fn link(&mut self, node: &TreeNode) -> Result<(), ParseError> {
        let id = self.vars[&node.var];
        for (raw_role, role_offset, value) in &node.children {
            let lower = raw_role.to_ascii_lowercase();
            if lower == "name" {
                if let TreeValue::Node(child) = value {
                    if child.concept == "name" {
                        let mut ops: Vec<(u32, String, Vec<usize>)> = Vec::new();
                        for (r, _, v) in &child.children {
                            if let (Some(n), TreeValue::Atom { text, alignment, .. }) = (
                                r.to_ascii_lowercase()
                                    .strip_prefix("op")
                                    .and_then(|n| n.parse::<u32>().ok()),
                                v,
                            ) {
                                ops.push((n, text.clone(), alignment.clone()));
                            }
                        }
                        ops.sort_by_key(|(n, _, _)| *n);
                        let target = &mut self.nodes[id.0];
                        for (_, text, align) in ops {
                            target.name.push(text);
                            target.alignment.extend(align);
                        }
                        continue;
                    }
                }
            }
            let inverted = lower.ends_with("-of") && !NON_INVERTED_OF.contains(&lower.as_str());
            let role = if inverted {
                normalize_role(&raw_role[..raw_role.len() - 3])
            } else {
                normalize_role(raw_role)
            };
            let target = match value {
                TreeValue::Node(child) => {
                    self.link(child)?;
                    self.vars[&child.var]
                }
                TreeValue::Atom {
                    text,
                    quoted,
                    offset,
                    alignment,
                } => {
                    if !quoted {
                        if let Some(&existing) = self.vars.get(text) {
                            existing
                        } else if looks_like_variable(text) {
                            return Err(ParseError {
                                message: "dangling variable reference".into(),
                                token: text.clone(),
                                offset: *offset,
                            });
                        } else {
                            if inverted {
                                return Err(ParseError {
                                    message: "inverted role cannot point to a constant".into(),
                                    token: format!(":{raw_role}"),
                                    offset: *role_offset,
                                });
                            }
                            self.constant(text, false, alignment)
                        }
                    } else {
                        if inverted {
                            return Err(ParseError {
                                message: "inverted role cannot point to a constant".into(),
                                token: format!(":{raw_role}"),
                                offset: *role_offset,
                            });
                        }
                        self.constant(text, true, alignment)
                    }
                }
            };
            let edge = if inverted {
                AmrEdge {
                    source: target,
                    target: id,
                    role,
                }
            } else {
                AmrEdge {
                    source: id,
                    target,
                    role,
                }
            };
            self.edges.push(edge);
        }
        Ok(())
    }
}
