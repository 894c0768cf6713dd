//! Generates distant-supervision examples from the toy corpus: one sentence per
//! KB triple whose endpoints co-occur, kept per relation above a threshold.
//!
//! ```text
//! cargo run --example distant_supervision [min_examples]
//! ```

use std::path::Path;

use amr_relink::ds::{generate, CorpusIndex, CorpusSentence, DsConfig};
use amr_relink::jsonl;
use amr_relink::kb::KbStore;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let kb = KbStore::load(&dir.join("kb.tsv"), Some(&dir.join("labels.tsv")), None)?;
    let sentences: Vec<CorpusSentence> = jsonl::read(&dir.join("corpus.jsonl"))?;
    let index = CorpusIndex::new(sentences, kb.prefixes());

    let min_examples = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let cfg = DsConfig {
        min_examples,
        ..DsConfig::default()
    };
    let out = generate(&kb, &index, &cfg);

    println!("{} sentences, {} examples", index.len(), out.examples.len());
    for r in &out.selected {
        let n = out.examples.iter().filter(|e| &e.relation == r).count();
        println!("  kept    {r:<16} {n}");
    }
    for (r, n) in &out.dropped {
        println!("  dropped {r:<16} {n}");
    }
    if let Some(ex) = out.examples.first() {
        println!(
            "\nfirst example: [{}] {} [{}]  in {:?}",
            ex.subject_surface(),
            ex.relation,
            ex.object_surface(),
            ex.text
        );
    }
    Ok(())
}
