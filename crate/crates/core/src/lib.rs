//! Relation linking for questions over a knowledge base, driven by AMR parses.
//!
//! The pipeline decomposes each question's AMR graph into binary triples
//! ([`triples`]), grounds their endpoints in the KB ([`metadata`]), scores
//! candidate KB relations with several independent scorers ([`scorers`]) and
//! sums their min-max normalized scores ([`rank`]). The statistical scorer is
//! trained from distant supervision ([`ds`], [`alignment`]).

pub mod alignment;
pub mod amr;
pub mod config;
pub mod ds;
pub mod embedding;
pub mod eval;
pub mod jsonl;
pub mod kb;
pub mod metadata;
pub mod neural;
pub mod pipeline;
pub mod rank;
pub mod scorers;
pub mod text;
pub mod triples;
