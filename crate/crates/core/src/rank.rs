//! Min-max normalization and score aggregation across scorers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scorers::ScoreMap;

/// Min-max normalization into `[0, 1]`. Non-finite scores are dropped and
/// negatives clamped to 0 first. When all values are equal (including the
/// single-value case) every relation gets 1.0.
pub fn normalize(scores: &ScoreMap) -> ScoreMap {
    let clean: ScoreMap = scores
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(k, v)| (k.clone(), v.max(0.0)))
        .collect();
    let min = clean.values().copied().fold(f64::INFINITY, f64::min);
    let max = clean.values().copied().fold(f64::NEG_INFINITY, f64::max);
    clean
        .into_iter()
        .map(|(k, v)| {
            let n = if max > min { (v - min) / (max - min) } else { 1.0 };
            (k, n.clamp(0.0, 1.0))
        })
        .collect()
}

/// Relations with their aggregate score, best first, ties by IRI.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedRelations(pub Vec<(String, f64)>);

impl RankedRelations {
    pub fn top(&self) -> Option<&(String, f64)> {
        self.0.first()
    }

    pub fn top_score(&self) -> f64 {
        self.0.first().map_or(0.0, |(_, s)| *s)
    }

    /// Up to `k` relations with a positive score.
    pub fn top_k(&self, k: usize) -> Vec<String> {
        self.0
            .iter()
            .filter(|(_, s)| *s > 0.0)
            .take(k)
            .map(|(r, _)| r.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sum of normalized scores per relation, absent entries counting as 0. The
/// per-relation terms are added in sorted order so the result does not depend
/// on the order of the scorers.
pub fn aggregate<'a>(modules: impl IntoIterator<Item = &'a ScoreMap>) -> RankedRelations {
    let mut terms: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for m in modules {
        for (r, v) in normalize(m) {
            terms.entry(r).or_default().push(v);
        }
    }
    let mut out: Vec<(String, f64)> = terms
        .into_iter()
        .map(|(r, mut vs)| {
            vs.sort_by(f64::total_cmp);
            (r, vs.iter().sum())
        })
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    RankedRelations(out)
}
