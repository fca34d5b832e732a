//! Built-in heuristic reader: pick the question's most TF-IDF-similar
//! sentence, then return its longest run of tokens that are neither
//! question words nor function words.

use std::collections::HashSet;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::squad::{Dataset, Paragraph};
use crate::text::lexicon::is_stopword;
use crate::text::{char_slice, normalize_answer, split_sentences, tokenize, TfidfModel, TokenSpan};

pub const DEFAULT_SPAN_CAP: usize = 15;

/// Question id to predicted answer text, in document order.
///
/// Serialized as the official predictions format: one JSON object. Parsing
/// rejects repeated keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Predictions(pub IndexMap<String, String>);

impl Predictions {
    pub fn get(&self, id: &str) -> Option<&str> {
        self.0.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("predictions serialization cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

impl<'de> Deserialize<'de> for Predictions {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PredictionsVisitor;

        impl<'de> Visitor<'de> for PredictionsVisitor {
            type Value = Predictions;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an object mapping question ids to answer strings")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut map: M) -> Result<Predictions, M::Error> {
                let mut out = IndexMap::new();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    if out.contains_key(&k) {
                        return Err(de::Error::custom(format!("duplicate prediction id {k:?}")));
                    }
                    out.insert(k, v);
                }
                Ok(Predictions(out))
            }
        }

        deserializer.deserialize_map(PredictionsVisitor)
    }
}

/// Index of the sentence most similar to the question; ties go to the
/// earliest sentence. Returns 0 for a paragraph without sentences.
pub fn select_sentence(question: &str, p: &Paragraph) -> usize {
    let texts = sentence_texts(p);
    best_sentence(question, &texts)
}

fn sentence_texts(p: &Paragraph) -> Vec<&str> {
    split_sentences(&p.context)
        .iter()
        .map(|s| char_slice(&p.context, s.start, s.end).expect("sentence within context"))
        .collect()
}

fn best_sentence(question: &str, sentences: &[&str]) -> usize {
    let model = TfidfModel::fit(sentences);
    let query = model.vectorize(question);
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in sentences.iter().enumerate() {
        let score = crate::text::tfidf::cosine(&query, &model.vectorize(s));
        if score > best.1 {
            best = (i, score);
        }
    }
    best.0
}

/// Longest run of sentence tokens that survive filtering, capped at `cap`
/// tokens and cut from `sentence` so inter-token text is kept.
///
/// A token is filtered when its normalized form is empty (punctuation,
/// articles), is a stopword, or occurs among the normalized question
/// tokens. With no survivors the whole (trimmed) sentence is returned.
pub fn select_span(
    sentence: &str,
    sentence_tokens: &[TokenSpan],
    question_tokens: &[TokenSpan],
    cap: usize,
) -> String {
    let question_terms: HashSet<String> = question_tokens
        .iter()
        .map(|t| normalize_answer(&t.text))
        .filter(|t| !t.is_empty())
        .collect();
    let keep: Vec<bool> = sentence_tokens
        .iter()
        .map(|t| {
            let norm = normalize_answer(&t.text);
            !norm.is_empty() && !is_stopword(&t.text) && !question_terms.contains(&norm)
        })
        .collect();

    let (mut best_start, mut best_len) = (0, 0);
    let mut run_start = 0;
    for i in 0..=keep.len() {
        if i < keep.len() && keep[i] {
            continue;
        }
        if i - run_start > best_len {
            best_start = run_start;
            best_len = i - run_start;
        }
        run_start = i + 1;
    }
    if best_len == 0 {
        return sentence.trim().to_string();
    }
    let len = best_len.min(cap.max(1));
    let first = &sentence_tokens[best_start];
    let last = &sentence_tokens[best_start + len - 1];
    char_slice(sentence, first.start, last.end)
        .expect("token offsets lie within the sentence")
        .to_string()
}

fn predict_paragraph(p: &Paragraph, cap: usize) -> Vec<(String, String)> {
    let sentences = sentence_texts(p);
    p.qas
        .iter()
        .map(|qa| {
            let answer = if sentences.is_empty() {
                String::new()
            } else {
                let sentence = sentences[best_sentence(&qa.question, &sentences)];
                select_span(sentence, &tokenize(sentence), &tokenize(&qa.question), cap)
            };
            (qa.id.clone(), answer)
        })
        .collect()
}

/// One prediction per question, in document order.
pub fn predict_with_cap(d: &Dataset, cap: usize) -> Predictions {
    let paragraphs: Vec<&Paragraph> = d.paragraphs().collect();
    let per_paragraph: Vec<Vec<(String, String)>> = paragraphs
        .par_iter()
        .map(|p| predict_paragraph(p, cap))
        .collect();
    Predictions(per_paragraph.into_iter().flatten().collect())
}

pub fn predict(d: &Dataset) -> Predictions {
    predict_with_cap(d, DEFAULT_SPAN_CAP)
}
