//! Precision, recall and F1 of predicted relation sets against gold sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{RDFS_LABEL, RDF_TYPE};

pub type RelationSets = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("question ids differ: missing from predictions {missing_pred:?}, missing from gold {missing_gold:?}")]
pub struct IdMismatch {
    pub missing_pred: Vec<String>,
    pub missing_gold: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Macro,
    Micro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub id: String,
    pub precision: f64,
    pub recall: f64,
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub averaging: Averaging,
    pub questions: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_question: Vec<QuestionScore>,
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// `correct / total`, with the empty-set conventions: 1 when both sides are
/// empty, 0 when only the denominator side is empty.
fn ratio(correct: usize, total: usize, other_total: usize) -> f64 {
    match (total, other_total) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => correct as f64 / total as f64,
    }
}

/// Drops `rdf:type` and `rdfs:label`, which are never scored.
pub fn filter_gold(gold: &BTreeSet<String>) -> BTreeSet<String> {
    gold.iter()
        .filter(|r| {
            let r = r.as_str();
            r != RDF_TYPE
                && r != RDFS_LABEL
                && r != "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
                && r != "http://www.w3.org/2000/01/rdf-schema#label"
        })
        .cloned()
        .collect()
}

/// Scores predictions against gold over the same question ids.
pub fn evaluate(
    predictions: &RelationSets,
    gold: &RelationSets,
    averaging: Averaging,
) -> Result<EvalReport, IdMismatch> {
    let missing_pred: Vec<String> = gold.keys().filter(|k| !predictions.contains_key(*k)).cloned().collect();
    let missing_gold: Vec<String> = predictions.keys().filter(|k| !gold.contains_key(*k)).cloned().collect();
    if !missing_pred.is_empty() || !missing_gold.is_empty() {
        return Err(IdMismatch {
            missing_pred,
            missing_gold,
        });
    }
    let per_question: Vec<QuestionScore> = gold
        .iter()
        .map(|(id, g)| {
            let g = filter_gold(g);
            let p = &predictions[id];
            let correct = p.intersection(&g).count();
            QuestionScore {
                id: id.clone(),
                precision: ratio(correct, p.len(), g.len()),
                recall: ratio(correct, g.len(), p.len()),
                correct,
                predicted: p.len(),
                gold: g.len(),
            }
        })
        .collect();
    let n = per_question.len();
    let (precision, recall) = match averaging {
        Averaging::Macro if n == 0 => (0.0, 0.0),
        Averaging::Macro => (
            per_question.iter().map(|q| q.precision).sum::<f64>() / n as f64,
            per_question.iter().map(|q| q.recall).sum::<f64>() / n as f64,
        ),
        Averaging::Micro => {
            let c: usize = per_question.iter().map(|q| q.correct).sum();
            let p: usize = per_question.iter().map(|q| q.predicted).sum();
            let g: usize = per_question.iter().map(|q| q.gold).sum();
            if n == 0 {
                (0.0, 0.0)
            } else {
                (ratio(c, p, g), ratio(c, g, p))
            }
        }
    };
    Ok(EvalReport {
        averaging,
        questions: n,
        precision,
        recall,
        f1: f1(precision, recall),
        per_question,
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:>9} {:>9}", "question", "precision", "recall")?;
        for q in &self.per_question {
            writeln!(f, "{:<24} {:>9.3} {:>9.3}", q.id, q.precision, q.recall)?;
        }
        writeln!(
            f,
            "{:?} over {} questions: P {:.3}  R {:.3}  F1 {:.3}",
            self.averaging, self.questions, self.precision, self.recall, self.f1
        )
    }
}
