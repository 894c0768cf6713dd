use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const DEFAULT_PREFIXES: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ("dbo", "http://dbpedia.org/ontology/"),
    ("dbp", "http://dbpedia.org/property/"),
    ("dbr", "http://dbpedia.org/resource/"),
    ("res", "http://dbpedia.org/resource/"),
];

/// Prefix table used to move between full IRIs and `prefix:local` qnames.
/// Earlier declarations win when two prefixes share a namespace.
#[derive(Debug, Clone)]
pub struct Prefixes {
    entries: Vec<(String, String)>,
}

impl Default for Prefixes {
    fn default() -> Self {
        Prefixes {
            entries: DEFAULT_PREFIXES
                .iter()
                .map(|(p, n)| (p.to_string(), n.to_string()))
                .collect(),
        }
    }
}

impl Prefixes {
    pub fn declare(&mut self, prefix: &str, namespace: &str) {
        if let Some(e) = self.entries.iter_mut().find(|(p, _)| p == prefix) {
            e.1 = namespace.to_string();
        } else {
            self.entries.push((prefix.to_string(), namespace.to_string()));
        }
    }

    /// Parses `@prefix ex: <http://example.org/> .`
    pub fn declare_line(&mut self, line: &str) -> Result<(), String> {
        let rest = line.trim().trim_start_matches("@prefix").trim();
        let rest = rest.strip_suffix('.').unwrap_or(rest).trim();
        let Some((prefix, ns)) = rest.split_once(char::is_whitespace) else {
            return Err(format!("malformed prefix declaration `{line}`"));
        };
        let prefix = prefix
            .strip_suffix(':')
            .ok_or_else(|| format!("prefix `{prefix}` must end with `:`"))?;
        let ns = ns.trim();
        let ns = ns
            .strip_prefix('<')
            .and_then(|n| n.strip_suffix('>'))
            .ok_or_else(|| format!("namespace `{ns}` must be written as <...>"))?;
        self.declare(prefix, ns);
        Ok(())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn expand(&self, qname: &str) -> Option<String> {
        let (prefix, local) = qname.split_once(':')?;
        self.entries
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, ns)| format!("{ns}{local}"))
    }

    pub fn compact(&self, iri: &str) -> String {
        let best = self
            .entries
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()) && iri.len() > ns.len())
            .fold(None::<&(String, String)>, |best, e| match best {
                Some(b) if b.1.len() >= e.1.len() => Some(b),
                _ => Some(e),
            });
        match best {
            Some((p, ns)) => format!("{p}:{}", &iri[ns.len()..]),
            None => iri.to_string(),
        }
    }

    /// Canonical compact IRI for `<full>`, bare `http(s)://...` or a qname with a
    /// declared prefix.
    pub fn parse_iri(&self, token: &str) -> Result<String, String> {
        let token = token.trim();
        if let Some(inner) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            if inner.is_empty() {
                return Err("empty IRI".into());
            }
            return Ok(self.compact(inner));
        }
        if token.starts_with("http://") || token.starts_with("https://") || token.starts_with("urn:")
        {
            return Ok(self.compact(token));
        }
        if token.starts_with('"') {
            return Err(format!("expected an IRI, found literal {token}"));
        }
        match token.split_once(':') {
            Some((prefix, local)) if !local.is_empty() && !token.contains(char::is_whitespace) => {
                match self.expand(token) {
                    Some(full) => Ok(self.compact(&full)),
                    None => Err(format!("unknown prefix `{prefix}:`")),
                }
            }
            _ => Err(format!("`{token}` is not an IRI or qname")),
        }
    }

    /// An IRI, or a literal when quoted or when it looks like a number or date.
    pub fn parse_term(&self, token: &str) -> Result<Term, String> {
        let token = token.trim();
        if let Some(inner) = token.strip_prefix('"') {
            let inner = inner
                .strip_suffix('"')
                .ok_or_else(|| format!("unterminated literal {token}"))?;
            return Ok(Term::Literal(Literal::new(&unescape(inner))));
        }
        if Datatype::sniff(token) != Datatype::String {
            return Ok(Term::Literal(Literal::new(token)));
        }
        self.parse_iri(token).map(Term::Iri)
    }
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Datatype {
    Number,
    Date,
    String,
}

impl Datatype {
    /// ISO dates (`YYYY-MM-DD`, `YYYY-MM`, optionally with a time part), then
    /// integers/decimals, else string.
    pub fn sniff(value: &str) -> Datatype {
        let v = value.trim();
        let b = v.as_bytes();
        let digits = |r: std::ops::Range<usize>| b.get(r).is_some_and(|s| s.iter().all(u8::is_ascii_digit));
        let is_date = (b.len() == 7 && digits(0..4) && b[4] == b'-' && digits(5..7))
            || (b.len() >= 10
                && digits(0..4)
                && b[4] == b'-'
                && digits(5..7)
                && b[7] == b'-'
                && digits(8..10)
                && (b.len() == 10 || b[10] == b'T'));
        if is_date {
            return Datatype::Date;
        }
        let body = v.strip_prefix(['+', '-']).unwrap_or(v);
        let (mantissa, exponent) = match body.split_once(['e', 'E']) {
            Some((m, e)) => (m, Some(e)),
            None => (body, None),
        };
        let (int, frac) = match mantissa.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (mantissa, None),
        };
        let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
        let numeric = all_digits(int)
            && frac.is_none_or(all_digits)
            && exponent.is_none_or(|e| all_digits(e.strip_prefix(['+', '-']).unwrap_or(e)));
        if numeric {
            Datatype::Number
        } else {
            Datatype::String
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Datatype::Number => "literal:number",
            Datatype::Date => "literal:date",
            Datatype::String => "literal:string",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub value: String,
    pub datatype: Datatype,
}

impl Literal {
    pub fn new(value: &str) -> Self {
        Literal {
            value: value.to_string(),
            datatype: Datatype::sniff(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    /// TSV token form: the IRI, or the literal value.
    pub fn key(&self) -> &str {
        match self {
            Term::Iri(i) => i,
            Term::Literal(l) => &l.value,
        }
    }
}

/// A class IRI or a literal datatype, as used by type constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeRef {
    Class(String),
    Datatype(Datatype),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Class(c) => f.write_str(c),
            TypeRef::Datatype(d) => f.write_str(d.tag()),
        }
    }
}

impl FromStr for TypeRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "literal:number" => TypeRef::Datatype(Datatype::Number),
            "literal:date" => TypeRef::Datatype(Datatype::Date),
            "literal:string" => TypeRef::Datatype(Datatype::String),
            other => TypeRef::Class(other.to_string()),
        })
    }
}

impl Serialize for TypeRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TypeRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap_or_else(|never| match never {}))
    }
}
