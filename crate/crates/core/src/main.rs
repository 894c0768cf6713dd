use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Deserialize;

use amr_relink::alignment::{build_table, pair_parses, AlignContext, FrameAliases};
use amr_relink::config::PipelineConfig;
use amr_relink::ds::{generate, CorpusIndex, CorpusSentence, DsExample};
use amr_relink::embedding::EmbeddingTable;
use amr_relink::eval::{evaluate, Averaging, RelationSets};
use amr_relink::jsonl;
use amr_relink::kb::{convert_ntriples, KbStore};
use amr_relink::metadata::QuestionRecord;
use amr_relink::pipeline::{ablate, gold_sets, Linker};

#[derive(Parser)]
#[command(name = "amr-relink", version, about = "AMR-based relation linking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KbArgs {
    /// Pipeline TOML; the flags below override its paths.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kb: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    hierarchy: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an N-Triples dump into kb.tsv, labels.tsv and hierarchy.tsv.
    ConvertNt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate distant-supervision examples from a mention-annotated corpus.
    GenDs {
        #[command(flatten)]
        kb: KbArgs,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        min_examples: Option<usize>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Build the alignment table from DS examples and their AMR parses.
    BuildAlignments {
        #[command(flatten)]
        kb: KbArgs,
        #[arg(long)]
        ds: PathBuf,
        /// Multi-graph PENMAN file, one record per DS example in order.
        #[arg(long)]
        amr: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Link the relations of every question.
    Link {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        questions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated scorer names.
        #[arg(long)]
        scorers: Option<String>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Score predictions against gold relations.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        micro: bool,
        #[arg(long)]
        json: bool,
    },
    /// Full system plus every leave-one-scorer-out configuration.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        questions: PathBuf,
        /// Gold file; defaults to the gold relations inside the questions.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        micro: bool,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Partial(String),
    Input(String),
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn config_from(args: &KbArgs) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::load(p).map_err(input)?,
        None => PipelineConfig::default(),
    };
    for (slot, flag) in [
        (&mut cfg.kb, &args.kb),
        (&mut cfg.labels, &args.labels),
        (&mut cfg.hierarchy, &args.hierarchy),
    ] {
        if flag.is_some() {
            *slot = flag.clone();
        }
    }
    Ok(cfg)
}

fn load_kb(cfg: &PipelineConfig) -> Result<KbStore, Failure> {
    let kb = KbStore::load(
        cfg.require("kb").map_err(input)?,
        cfg.optional("labels").map_err(input)?,
        cfg.optional("hierarchy").map_err(input)?,
    )
    .map_err(input)?;
    for w in kb.warnings() {
        log::warn!("{w}");
    }
    Ok(kb)
}

#[derive(Deserialize)]
struct PredLine {
    id: String,
    predicted: Vec<String>,
}

#[derive(Deserialize)]
struct GoldLine {
    id: String,
    gold_relations: Option<Vec<String>>,
}

fn read_gold(path: &Path) -> Result<RelationSets, Failure> {
    let lines: Vec<GoldLine> = jsonl::read(path).map_err(input)?;
    lines
        .into_iter()
        .map(|l| match l.gold_relations {
            Some(g) => Ok((l.id, g.into_iter().collect::<BTreeSet<_>>())),
            None => Err(Failure::Input(format!("{}: question {} has no gold_relations", path.display(), l.id))),
        })
        .collect()
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::ConvertNt { input: src, out } => {
            let s = convert_ntriples(&src, &out).map_err(input)?;
            eprintln!(
                "{} triples, {} labels, {} subclass axioms, {} lines skipped",
                s.triples, s.labels, s.subclass, s.skipped
            );
            if s.skipped > 0 {
                return Err(Failure::Partial(format!("{} lines skipped", s.skipped)));
            }
        }
        Command::GenDs {
            kb,
            corpus,
            out,
            min_examples,
            limit,
        } => {
            let mut cfg = config_from(&kb)?;
            if let Some(m) = min_examples {
                cfg.min_examples = m;
            }
            if let Some(l) = limit {
                cfg.triple_limit = l;
            }
            cfg.validate().map_err(input)?;
            let kb = load_kb(&cfg)?;
            let sentences: Vec<CorpusSentence> = jsonl::read(&corpus).map_err(input)?;
            let index = CorpusIndex::new(sentences, kb.prefixes());
            let ds = generate(&kb, &index, &cfg.ds());
            jsonl::write(&out, &ds.examples).map_err(input)?;
            eprintln!(
                "{} examples over {} relations; {} relations below {} examples",
                ds.examples.len(),
                ds.selected.len(),
                ds.dropped.len(),
                cfg.min_examples
            );
        }
        Command::BuildAlignments {
            kb,
            ds,
            amr,
            out,
            theta,
        } => {
            let mut cfg = config_from(&kb)?;
            if let Some(t) = theta {
                cfg.theta = t;
            }
            cfg.validate().map_err(input)?;
            let kb = load_kb(&cfg)?;
            let aliases = match cfg.optional("frame_aliases").map_err(input)? {
                Some(p) => FrameAliases::load(p).map_err(input)?,
                None => FrameAliases::default(),
            };
            let embeddings = match cfg.optional("embeddings").map_err(input)? {
                Some(p) => EmbeddingTable::load(p).map_err(input)?,
                None => EmbeddingTable::default(),
            };
            let examples: Vec<DsExample> = jsonl::read(&ds).map_err(input)?;
            let penman = fs::read_to_string(&amr).map_err(|e| input(format!("{}: {e}", amr.display())))?;
            let paired = pair_parses(examples, &penman).map_err(input)?;
            let ctx = AlignContext {
                kb: &kb,
                aliases: &aliases,
                embeddings: &embeddings,
            };
            let (table, report) = build_table(ctx, &paired, &cfg.alignment());
            table.save(&out).map_err(input)?;
            eprintln!(
                "{} examples: {} without AMR, {} unaligned, {} alignments, {} filtered by type",
                report.examples, report.skipped, report.unaligned, report.alignments, report.filtered
            );
            if report.skipped > 0 {
                return Err(Failure::Partial(format!("{} examples had no usable AMR", report.skipped)));
            }
        }
        Command::Link {
            config,
            questions,
            out,
            scorers,
            k,
        } => {
            let mut cfg = PipelineConfig::load(&config).map_err(input)?;
            if let Some(s) = scorers {
                cfg.set_scorers(&s).map_err(input)?;
            }
            if let Some(k) = k {
                cfg.k = k;
                cfg.validate().map_err(input)?;
            }
            let linker = Linker::from_config(&cfg).map_err(input)?;
            let qs: Vec<QuestionRecord> = jsonl::read(&questions).map_err(input)?;
            info!("linking {} questions with {:?}", qs.len(), linker.scorer_names());
            let outputs = linker.link_all(&qs);
            jsonl::write(&out, &outputs).map_err(input)?;
            let failed = outputs.iter().filter(|o| o.error.is_some()).count();
            eprintln!("{} questions linked, {failed} failed", outputs.len());
            if failed > 0 {
                return Err(Failure::Partial(format!("{failed} questions failed")));
            }
        }
        Command::Eval {
            pred,
            gold,
            micro,
            json,
        } => {
            let lines: Vec<PredLine> = jsonl::read(&pred).map_err(input)?;
            let pred: RelationSets = lines.into_iter().map(|l| (l.id, l.predicted.into_iter().collect())).collect();
            let gold = read_gold(&gold)?;
            let averaging = if micro { Averaging::Micro } else { Averaging::Macro };
            let report = evaluate(&pred, &gold, averaging).map_err(input)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).map_err(input)?);
            } else {
                print!("{report}");
            }
        }
        Command::Ablate {
            config,
            questions,
            gold,
            micro,
            json,
        } => {
            let cfg = PipelineConfig::load(&config).map_err(input)?;
            let linker = Linker::from_config(&cfg).map_err(input)?;
            let qs: Vec<QuestionRecord> = jsonl::read(&questions).map_err(input)?;
            let gold = match gold {
                Some(p) => read_gold(&p)?,
                None => gold_sets(&qs),
            };
            let outputs = linker.link_all(&qs);
            let scored: Vec<_> = outputs.into_iter().filter(|o| gold.contains_key(&o.id)).collect();
            let averaging = if micro { Averaging::Micro } else { Averaging::Macro };
            let rows = ablate(&scored, &gold, &linker.scorer_names(), linker.k(), averaging).map_err(input)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rows).map_err(input)?);
            } else {
                println!("{:<16} {:>9} {:>9} {:>9}", "configuration", "precision", "recall", "f1");
                for r in &rows {
                    println!("{:<16} {:>9.3} {:>9.3} {:>9.3}", r.name, r.precision, r.recall, r.f1);
                }
            }
            let failed = scored.iter().filter(|o| o.error.is_some()).count();
            if failed > 0 {
                return Err(Failure::Partial(format!("{failed} questions failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(m)) => {
            eprintln!("partial failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
