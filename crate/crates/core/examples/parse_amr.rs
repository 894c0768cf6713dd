//! Parses a PENMAN graph, lists its frames and expands every frame into
//! binary AMR triples.
//!
//! ```text
//! cargo run --example parse_amr [file.penman]
//! ```

use std::env;
use std::fs;
use std::process::ExitCode;

use amr_relink::amr::{split_records, AmrGraph};
use amr_relink::triples::decompose;

const TESLA: &str = r#"# ::snt Duka Tesla gave birth to Nikola Tesla in Smiljan in 1856.
(b / bear-02~e.2
   :ARG0 (d / person :name (n / name :op1 "Duka"~e.0 :op2 "Tesla"~e.1))
   :ARG1 (p / person :name (n2 / name :op1 "Nikola"~e.5 :op2 "Tesla"~e.6))
   :location (c / city :name (n3 / name :op1 "Smiljan"~e.8))
   :time (d2 / date-entity :year 1856~e.10))
"#;

fn main() -> ExitCode {
    let input = match env::args().nth(1) {
        Some(path) => match fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{path}: {e}");
                return ExitCode::from(2);
            }
        },
        None => TESLA.to_string(),
    };

    for (i, record) in split_records(&input).iter().enumerate() {
        let sentence = record.metadata.get("snt").map(String::as_str).unwrap_or("");
        let graph = match AmrGraph::parse_with_text(&record.penman, sentence) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("record {}: {e}", i + 1);
                return ExitCode::from(2);
            }
        };
        println!("# record {} ({} nodes)", i + 1, graph.nodes().len());
        for node in graph.nodes() {
            let span = node
                .span
                .as_ref()
                .map(|s| format!("  [{}..{}) {:?}", s.start, s.end, s.text))
                .unwrap_or_default();
            println!("{:>4}  {:<14} {}{span}", node.id.to_string(), node.concept, graph.label(node.id));
        }
        for frame in graph.frames() {
            let roles: Vec<_> = frame.fillers.iter().map(|(r, _)| r.as_str()).collect();
            println!("frame {} with roles {}", frame.frame, roles.join(", "));
        }
        let triples = decompose(&graph);
        println!("{} triples:", triples.len());
        for t in &triples {
            println!("  {}\t{}\t{}", t.subject.surface, t.predicate, t.object.surface);
        }
        println!("round trip:\n{}", graph.to_penman());
    }
    ExitCode::SUCCESS
}
