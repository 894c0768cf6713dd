//! Builds the AMR-predicate to KB-relation alignment table from the toy DS
//! examples and their parses, then prints the scored candidates per predicate.

use std::fs;
use std::path::Path;

use amr_relink::alignment::{build_table, pair_parses, AlignContext, AlignmentConfig, FrameAliases};
use amr_relink::ds::DsExample;
use amr_relink::embedding::EmbeddingTable;
use amr_relink::jsonl;
use amr_relink::kb::KbStore;
use amr_relink::triples::AmrPredicate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let kb = KbStore::load(
        &dir.join("kb.tsv"),
        Some(&dir.join("labels.tsv")),
        Some(&dir.join("hierarchy.tsv")),
    )?;
    let aliases = FrameAliases::load(&dir.join("frame_aliases.tsv"))?;
    let embeddings = EmbeddingTable::load(&dir.join("embeddings.txt"))?;
    let examples: Vec<DsExample> = jsonl::read(&dir.join("ds.jsonl"))?;
    let paired = pair_parses(examples, &fs::read_to_string(dir.join("ds_amr.penman"))?)?;

    let ctx = AlignContext {
        kb: &kb,
        aliases: &aliases,
        embeddings: &embeddings,
    };
    let (table, report) = build_table(ctx, &paired, &AlignmentConfig::default());
    println!("{report:?}\n");

    for predicate in table.counts.keys() {
        let p: AmrPredicate = predicate.parse()?;
        let scored: Vec<String> = table
            .candidates(&p)
            .iter()
            .map(|(r, s)| format!("{r} {s:.3}"))
            .collect();
        println!("{predicate:<30} {}", scored.join(", "));
    }

    println!("\ninduced role constraints:");
    for (role, c) in &table.constraints {
        let admissible: Vec<String> = c.admissible.iter().map(|t| t.to_string()).collect();
        println!("  {role:<24} {} observations -> {}", c.total, admissible.join(" | "));
    }
    Ok(())
}
