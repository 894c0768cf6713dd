//! Links every toy question, scores the predictions against the gold relations
//! and repeats the scoring with each scorer left out in turn.

use std::path::Path;

use amr_relink::config::PipelineConfig;
use amr_relink::eval::{evaluate, Averaging};
use amr_relink::jsonl;
use amr_relink::metadata::QuestionRecord;
use amr_relink::pipeline::{ablate, gold_sets, predictions, Linker};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let cfg = PipelineConfig::load(&dir.join("config.toml"))?;
    let linker = Linker::from_config(&cfg)?;
    let questions: Vec<QuestionRecord> = jsonl::read(&dir.join("questions.jsonl"))?;

    let outputs = linker.link_all(&questions);
    let gold = gold_sets(&questions);
    let report = evaluate(&predictions(&outputs), &gold, Averaging::Macro)?;
    print!("{report}");
    let micro = evaluate(&predictions(&outputs), &gold, Averaging::Micro)?;
    println!("micro F1 {:.3}\n", micro.f1);

    for row in ablate(&outputs, &gold, &linker.scorer_names(), linker.k(), Averaging::Macro)? {
        println!("{:<14} P {:.3}  R {:.3}  F1 {:.3}", row.name, row.precision, row.recall, row.f1);
    }
    Ok(())
}
