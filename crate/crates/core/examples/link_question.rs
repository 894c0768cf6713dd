//! Links one toy question and shows how each scorer ranked every AMR triple.
//!
//! ```text
//! cargo run --example link_question [question-id]
//! ```

use std::path::Path;

use amr_relink::config::PipelineConfig;
use amr_relink::jsonl;
use amr_relink::metadata::{Grounding, QuestionRecord};
use amr_relink::pipeline::Linker;

fn show(g: &Grounding) -> String {
    match g {
        Grounding::Entity(v) => v.clone(),
        Grounding::Class(v) => format!("class {v}"),
        Grounding::Literal(v) => format!("literal {v}"),
        Grounding::Unknown(v) => format!("unknown:{v}"),
        Grounding::Ungrounded => "ungrounded".into(),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let cfg = PipelineConfig::load(&dir.join("config.toml"))?;
    let linker = Linker::from_config(&cfg)?;
    let questions: Vec<QuestionRecord> = jsonl::read(&dir.join("questions.jsonl"))?;

    let id = std::env::args().nth(1).unwrap_or_else(|| "q01".into());
    let q = questions
        .iter()
        .find(|q| q.id == id)
        .ok_or_else(|| format!("no question {id}"))?;
    let out = linker.link(q)?;

    println!("{}  {}", q.id, q.text);
    for t in &out.triples {
        let mark = if t.selected { "*" } else { " " };
        println!(
            "{mark} {} | {} | {}",
            show(&t.triple.subject),
            t.triple.triple.predicate,
            show(&t.triple.object)
        );
        for (module, scores) in &t.modules {
            let mut best: Vec<_> = scores.iter().collect();
            best.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
            let best: Vec<String> = best.iter().take(3).map(|(r, s)| format!("{r} {s:.2}")).collect();
            println!("      {module:<8} {}", best.join(", "));
        }
        let top: Vec<String> = t.ranked.0.iter().take(3).map(|(r, s)| format!("{r} {s:.2}")).collect();
        println!("      {:<8} {}", "total", top.join(", "));
    }
    println!("predicted: {:?}", out.predicted);
    if let Some(gold) = &q.gold_relations {
        println!("gold:      {gold:?}");
    }
    Ok(())
}
