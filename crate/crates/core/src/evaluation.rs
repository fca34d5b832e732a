//! Exact match and token F1 in the style of the official SQuAD v1.1 script,
//! plus the F1 drop between a baseline run and an ablated run.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ablations::AblationId;
use crate::reader::Predictions;
use crate::squad::Dataset;
use crate::text::{normalize_answer, normalized_tokens};

pub fn exact_match(pred: &str, golds: &[&str]) -> u8 {
    let pred = normalize_answer(pred);
    u8::from(golds.iter().any(|g| normalize_answer(g) == pred))
}

/// Max over golds of the token F1 between normalized token multisets.
/// Two empty token lists score 1; exactly one empty side scores 0.
pub fn token_f1(pred: &str, golds: &[&str]) -> f64 {
    let pred_tokens = normalized_tokens(pred);
    golds
        .iter()
        .map(|g| f1_pair(&pred_tokens, &normalized_tokens(g)))
        .fold(0.0, f64::max)
}

fn f1_pair(pred: &[String], gold: &[String]) -> f64 {
    if pred.is_empty() || gold.is_empty() {
        return if pred.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
    }
    let mut gold_counts: HashMap<&str, usize> = HashMap::new();
    for t in gold {
        *gold_counts.entry(t).or_default() += 1;
    }
    let mut overlap = 0usize;
    for t in pred {
        if let Some(c) = gold_counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / pred.len() as f64;
    let recall = overlap as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub em: u8,
    pub f1: f64,
}

/// Aggregate scores as percentages, unrounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub em: f64,
    pub f1: f64,
    #[serde(rename = "n")]
    pub question_count: usize,
    pub per_question: IndexMap<String, QuestionScore>,
}

impl EvalResult {
    pub fn from_scores(per_question: IndexMap<String, QuestionScore>) -> Self {
        let n = per_question.len();
        if n == 0 {
            return Self { em: 0.0, f1: 0.0, question_count: 0, per_question };
        }
        let em_sum: u64 = per_question.values().map(|s| u64::from(s.em)).sum();
        let mut f1s: Vec<f64> = per_question.values().map(|s| s.f1).collect();
        // Sorting first makes the sum independent of question order.
        f1s.sort_by(f64::total_cmp);
        Self {
            em: 100.0 * em_sum as f64 / n as f64,
            f1: 100.0 * f1s.iter().sum::<f64>() / n as f64,
            question_count: n,
            per_question,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("eval serialization cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("missing predictions for {} question(s): {}", .0.len(), preview(.0))]
    MissingPrediction(Vec<String>),
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut s = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", ids.len() - SHOWN));
    }
    s
}

/// A scored run plus prediction ids that match no question (a warning, not
/// an error).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub result: EvalResult,
    pub unknown_ids: Vec<String>,
}

pub fn evaluate_dataset(d: &Dataset, preds: &Predictions) -> Result<Evaluation, EvalError> {
    let mut missing = Vec::new();
    let mut scores = IndexMap::with_capacity(d.question_count());
    for (_, qa) in d.questions() {
        match preds.get(&qa.id) {
            Some(pred) => {
                let golds = qa.gold_texts();
                scores.insert(
                    qa.id.clone(),
                    QuestionScore { em: exact_match(pred, &golds), f1: token_f1(pred, &golds) },
                );
            }
            None => missing.push(qa.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(EvalError::MissingPrediction(missing));
    }
    let unknown_ids = preds
        .0
        .keys()
        .filter(|k| !scores.contains_key(k.as_str()))
        .cloned()
        .collect();
    Ok(Evaluation { result: EvalResult::from_scores(scores), unknown_ids })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub ablation: AblationId,
    pub em: f64,
    pub f1: f64,
    pub f1_drop: f64,
    pub baseline_f1: f64,
}

/// The caller pairs each ablation with the baseline of its regime: the full
/// dataset for e3, e4, e5 and the truncated one for the insertion ablations.
pub fn compute_drop(baseline: &EvalResult, ablated: &EvalResult, id: AblationId) -> DeltaResult {
    drop_from_scores(baseline.f1, ablated.em, ablated.f1, id)
}

pub fn drop_from_scores(baseline_f1: f64, em: f64, f1: f64, id: AblationId) -> DeltaResult {
    DeltaResult { ablation: id, em, f1, f1_drop: baseline_f1 - f1, baseline_f1 }
}
