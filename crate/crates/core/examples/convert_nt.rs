//! Converts a small N-Triples dump into the three TSV files the KB loader reads,
//! then loads them back.
//!
//! ```text
//! cargo run --example convert_nt [dump.nt] [out-dir]
//! ```

use std::env;
use std::fs;
use std::path::PathBuf;

use amr_relink::kb::{convert_ntriples, KbStore};

const DUMP: &str = r#"<http://dbpedia.org/resource/Skype> <http://dbpedia.org/ontology/developer> <http://dbpedia.org/resource/Microsoft> .
<http://dbpedia.org/resource/Skype> <http://www.w3.org/2000/01/rdf-schema#label> "Skype"@en .
<http://dbpedia.org/resource/Skype> <http://www.w3.org/2000/01/rdf-schema#label> "Skype"@de .
<http://dbpedia.org/resource/Skype> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://dbpedia.org/ontology/Software> .
<http://dbpedia.org/resource/Skype> <http://dbpedia.org/ontology/releaseDate> "2003-08-29"^^<http://www.w3.org/2001/XMLSchema#date> .
<http://dbpedia.org/resource/Microsoft> <http://xmlns.com/foaf/0.1/name> "Microsoft Corporation" .
<http://dbpedia.org/ontology/Software> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://dbpedia.org/ontology/Work> .
_:b0 <http://dbpedia.org/ontology/developer> <http://dbpedia.org/resource/Microsoft> .
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = env::args().skip(1);
    let scratch = env::temp_dir().join(format!("amr-relink-convert-{}", std::process::id()));
    let input = match args.next() {
        Some(p) => PathBuf::from(p),
        None => {
            fs::create_dir_all(&scratch)?;
            let p = scratch.join("dump.nt");
            fs::write(&p, DUMP)?;
            p
        }
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| scratch.join("kb"));

    let summary = convert_ntriples(&input, &out)?;
    println!("{summary:?}");
    for name in ["kb.tsv", "labels.tsv", "hierarchy.tsv"] {
        println!("--- {name}");
        print!("{}", fs::read_to_string(out.join(name))?);
    }

    let kb = KbStore::load(
        &out.join("kb.tsv"),
        Some(&out.join("labels.tsv")),
        Some(&out.join("hierarchy.tsv")),
    )?;
    println!("---\nreloaded {} triples; Skype is {:?}", kb.triple_count(), kb.types_of("dbr:Skype"));
    Ok(())
}
