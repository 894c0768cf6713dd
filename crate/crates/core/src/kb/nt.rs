//! N-Triples to the three TSV files read by [`super::KbStore::load`].

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::term::{escape_literal, Datatype, Prefixes};
use super::{KbError, RDFS_LABEL, RDFS_SUBCLASS_OF};

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ConvertSummary {
    pub triples: usize,
    pub labels: usize,
    pub subclass: usize,
    pub skipped: usize,
}

#[derive(Debug, PartialEq)]
enum NtTerm {
    Iri(String),
    Blank(String),
    Literal { value: String, lang: Option<String> },
}

fn parse_line(line: &str) -> Result<Option<[NtTerm; 3]>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    let mut terms = Vec::with_capacity(3);
    while terms.len() < 3 {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        match chars.get(i) {
            Some('<') => {
                let start = i + 1;
                while i < chars.len() && chars[i] != '>' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err("unterminated IRI".into());
                }
                terms.push(NtTerm::Iri(chars[start..i].iter().collect()));
                i += 1;
            }
            Some('_') => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() {
                    i += 1;
                }
                terms.push(NtTerm::Blank(chars[start..i].iter().collect()));
            }
            Some('"') => {
                i += 1;
                let mut value = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated literal".into()),
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some('n') => value.push('\n'),
                                Some('t') => value.push('\t'),
                                Some('r') => value.push('\r'),
                                Some(&c) => value.push(c),
                                None => return Err("dangling escape".into()),
                            }
                            i += 2;
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(&c) => {
                            value.push(c);
                            i += 1;
                        }
                    }
                }
                let mut lang = None;
                if chars.get(i) == Some(&'@') {
                    let start = i + 1;
                    while i < chars.len() && !chars[i].is_whitespace() {
                        i += 1;
                    }
                    lang = Some(chars[start..i].iter().collect());
                } else if chars.get(i) == Some(&'^') {
                    // datatype IRIs are dropped; literals are re-typed by sniffing
                    while i < chars.len() && chars[i] != '>' {
                        i += 1;
                    }
                    i += 1;
                }
                terms.push(NtTerm::Literal { value, lang });
            }
            Some(c) => return Err(format!("unexpected character `{c}`")),
            None => return Err("expected three terms".into()),
        }
    }
    let rest: String = chars[i.min(chars.len())..].iter().collect();
    if rest.trim() != "." {
        return Err("expected terminating `.`".into());
    }
    let [s, p, o]: [NtTerm; 3] = terms.try_into().map_err(|_| "expected three terms")?;
    Ok(Some([s, p, o]))
}

/// Converts an N-Triples file into `kb.tsv`, `labels.tsv` and `hierarchy.tsv`
/// under `out_dir`. Blank nodes and non-English language-tagged labels are skipped.
pub fn convert_ntriples(input: &Path, out_dir: &Path) -> Result<ConvertSummary, KbError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| KbError::Io { path, source }
    };
    let reader = BufReader::new(File::open(input).map_err(io(input))?);
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let prefixes = Prefixes::default();
    let open = |name: &str| -> Result<BufWriter<File>, KbError> {
        let p = out_dir.join(name);
        Ok(BufWriter::new(File::create(&p).map_err(io(&p))?))
    };
    let mut kb = open("kb.tsv")?;
    let mut labels = open("labels.tsv")?;
    let mut hierarchy = open("hierarchy.tsv")?;
    let kb_path = out_dir.join("kb.tsv");
    let mut summary = ConvertSummary::default();

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io(input))?;
        let parsed = parse_line(&line).map_err(|message| KbError::Malformed {
            path: input.to_path_buf(),
            line: i + 1,
            message,
        })?;
        let Some([s, p, o]) = parsed else { continue };
        let (NtTerm::Iri(s), NtTerm::Iri(p)) = (s, p) else {
            warn!("{}:{}: blank node subject or predicate skipped", input.display(), i + 1);
            summary.skipped += 1;
            continue;
        };
        let (s, p) = (prefixes.compact(&s), prefixes.compact(&p));
        let result = match (p.as_str(), o) {
            (RDFS_LABEL, NtTerm::Literal { value, lang }) => {
                if lang.as_deref().is_none_or(|l| l == "en" || l.starts_with("en-")) {
                    summary.labels += 1;
                    writeln!(labels, "{s}\t{}", value.replace(['\t', '\n'], " "))
                } else {
                    summary.skipped += 1;
                    Ok(())
                }
            }
            (RDFS_SUBCLASS_OF, NtTerm::Iri(o)) => {
                summary.subclass += 1;
                writeln!(hierarchy, "{s}\t{}", prefixes.compact(&o))
            }
            (_, NtTerm::Iri(o)) => {
                summary.triples += 1;
                writeln!(kb, "{s}\t{p}\t{}", prefixes.compact(&o))
            }
            (_, NtTerm::Literal { value, .. }) => {
                summary.triples += 1;
                let token = if Datatype::sniff(&value) != Datatype::String
                    && value.trim() == value
                {
                    value
                } else {
                    escape_literal(&value)
                };
                writeln!(kb, "{s}\t{p}\t{token}")
            }
            (_, NtTerm::Blank(_)) => {
                summary.skipped += 1;
                Ok(())
            }
        };
        result.map_err(io(&kb_path))?;
    }
    for w in [&mut kb, &mut labels, &mut hierarchy] {
        w.flush().map_err(io(&kb_path))?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::KbStore;

    #[test]
    fn line_parser() {
        let t = parse_line(r#"<http://a> <http://b> "x \"y\""@en ."#).unwrap().unwrap();
        assert_eq!(
            t[2],
            NtTerm::Literal {
                value: "x \"y\"".into(),
                lang: Some("en".into())
            }
        );
        assert!(parse_line("# c").unwrap().is_none());
        assert!(parse_line("<http://a> <http://b> <http://c>").is_err());
        assert!(parse_line("<http://a> <http://b>").is_err());
    }

    #[test]
    fn converts_and_loads() {
        let dir = tempfile::tempdir().unwrap();
        let nt = dir.path().join("in.nt");
        fs::write(
            &nt,
            "<http://dbpedia.org/resource/Nikola_Tesla> <http://dbpedia.org/ontology/birthPlace> <http://dbpedia.org/resource/Smiljan> .\n\
             <http://dbpedia.org/resource/Nikola_Tesla> <http://www.w3.org/2000/01/rdf-schema#label> \"Nikola Tesla\"@en .\n\
             <http://dbpedia.org/resource/Nikola_Tesla> <http://www.w3.org/2000/01/rdf-schema#label> \"Nikola Tesla\"@de .\n\
             <http://dbpedia.org/resource/Nikola_Tesla> <http://dbpedia.org/ontology/birthYear> \"1856\"^^<http://www.w3.org/2001/XMLSchema#gYear> .\n\
             <http://dbpedia.org/resource/Nikola_Tesla> <http://dbpedia.org/property/motto> \"tab\there\" .\n\
             <http://dbpedia.org/ontology/Scientist> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://dbpedia.org/ontology/Person> .\n\
             <http://dbpedia.org/resource/Nikola_Tesla> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://dbpedia.org/ontology/Scientist> .\n\
             _:b0 <http://dbpedia.org/ontology/x> <http://dbpedia.org/resource/Y> .\n",
        )
        .unwrap();
        let out = dir.path().join("out");
        let summary = convert_ntriples(&nt, &out).unwrap();
        assert_eq!(
            summary,
            ConvertSummary {
                triples: 4,
                labels: 1,
                subclass: 1,
                skipped: 2
            }
        );
        let kb = KbStore::load(
            &out.join("kb.tsv"),
            Some(&out.join("labels.tsv")),
            Some(&out.join("hierarchy.tsv")),
        )
        .unwrap();
        assert!(kb
            .relations_between("dbr:Nikola_Tesla", "dbr:Smiljan")
            .contains("dbo:birthPlace"));
        assert!(kb.relations_between("dbr:Nikola_Tesla", "1856").contains("dbo:birthYear"));
        assert!(kb
            .relations_between("dbr:Nikola_Tesla", "\"tab\\there\"")
            .contains("dbp:motto"));
        assert!(kb.is_compatible_type(
            "dbr:Nikola_Tesla",
            &crate::kb::TypeRef::Class("dbo:Person".into())
        ));
        assert_eq!(kb.entities_with_label("nikola tesla"), vec!["dbr:Nikola_Tesla"]);
    }
}
