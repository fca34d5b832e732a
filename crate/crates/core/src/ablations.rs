//! The eight dataset perturbations, one per bias unit.
//!
//! | id | category        | perturbation                                           |
//! |----|-----------------|--------------------------------------------------------|
//! | e1 | similarity bias | insert the full question before a non-answer sentence  |
//! | e2 | similarity bias | insert half of the question likewise                   |
//! | e3 | similarity bias | shuffle the sentence order of the paragraph            |
//! | e4 | question bias   | keep only the interrogative words of the question      |
//! | e5 | question bias   | shuffle the words of the question                      |
//! | e6 | keyword bias    | insert the question's nouns before a non-answer sentence |
//! | e7 | keyword bias    | insert the question's verbs likewise                   |
//! | e8 | keyword bias    | insert the question's adjectives likewise              |
//!
//! Each question draws its randomness from `derive_seed(global_seed, id)`,
//! so results do not depend on processing order. Inserted payloads are
//! prepended to the chosen sentence followed by one space. A question that
//! cannot be perturbed is left as is and flagged in its record.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::squad::{is_truncated, Article, Dataset, Paragraph, Qa};
use crate::text::{
    char_len, char_slice, derive_seed, extract_interrogatives, extract_keywords, split_sentences,
    tokenize, PosClass, SplitMix64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AblationId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BiasCategory {
    SimilarityBias,
    QuestionBias,
    KeywordBias,
}

impl BiasCategory {
    pub const ALL: [BiasCategory; 3] = [
        BiasCategory::SimilarityBias,
        BiasCategory::QuestionBias,
        BiasCategory::KeywordBias,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BiasCategory::SimilarityBias => "Similarity Bias",
            BiasCategory::QuestionBias => "Question Bias",
            BiasCategory::KeywordBias => "Keyword Bias",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutates {
    Context,
    Question,
}

/// Registry entry for one bias unit: what it perturbs and which information
/// it takes away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AblationSpec {
    pub id: AblationId,
    pub name: &'static str,
    pub category: BiasCategory,
    pub requires_truncated: bool,
    pub ablated_information: &'static str,
    pub mutates: Mutates,
}

impl AblationId {
    pub const ALL: [AblationId; 8] = [
        AblationId::E1,
        AblationId::E2,
        AblationId::E3,
        AblationId::E4,
        AblationId::E5,
        AblationId::E6,
        AblationId::E7,
        AblationId::E8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AblationId::E1 => "e1",
            AblationId::E2 => "e2",
            AblationId::E3 => "e3",
            AblationId::E4 => "e4",
            AblationId::E5 => "e5",
            AblationId::E6 => "e6",
            AblationId::E7 => "e7",
            AblationId::E8 => "e8",
        }
    }

    pub fn spec(self) -> AblationSpec {
        use AblationId::*;
        use BiasCategory::*;
        let (name, category, ablated_information, mutates) = match self {
            E1 => (
                "insert full question",
                SimilarityBias,
                "the answer sentence being the one most similar to the question",
                Mutates::Context,
            ),
            E2 => (
                "insert half question",
                SimilarityBias,
                "the answer sentence being the one most similar to the question prefix",
                Mutates::Context,
            ),
            E3 => (
                "shuffle sentence order",
                SimilarityBias,
                "the order of and relations between context sentences",
                Mutates::Context,
            ),
            E4 => (
                "interrogative words only",
                QuestionBias,
                "every question word except the interrogatives",
                Mutates::Question,
            ),
            E5 => (
                "shuffle question words",
                QuestionBias,
                "the word order of the question",
                Mutates::Question,
            ),
            E6 => (
                "insert key nouns",
                KeywordBias,
                "question nouns appearing only near the answer",
                Mutates::Context,
            ),
            E7 => (
                "insert key verbs",
                KeywordBias,
                "question verbs appearing only near the answer",
                Mutates::Context,
            ),
            E8 => (
                "insert key adjectives",
                KeywordBias,
                "question adjectives appearing only near the answer",
                Mutates::Context,
            ),
        };
        AblationSpec {
            id: self,
            name,
            category,
            requires_truncated: matches!(self, E1 | E2 | E6 | E7 | E8),
            ablated_information,
            mutates,
        }
    }
}

impl fmt::Display for AblationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AblationId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AblationId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown ablation {s:?} (expected e1..e8)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    NoEligibleSentence,
    EmptyPayload,
    AnswerCrossesSentenceBoundary,
}

/// What a perturbation did to one question. `applied` is true exactly when
/// `skip_reason` is absent.
///
/// For e4 an `EmptyPayload` skip still rewrites the question: it has no
/// interrogative words, so it becomes empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub question_id: String,
    pub applied: bool,
    pub target_sentence_index: Option<usize>,
    pub inserted_text: Option<String>,
    pub skip_reason: Option<SkipReason>,
    pub seed: u64,
}

impl PerturbationRecord {
    fn applied(question_id: &str, seed: u64) -> Self {
        Self {
            question_id: question_id.to_string(),
            applied: true,
            target_sentence_index: None,
            inserted_text: None,
            skip_reason: None,
            seed,
        }
    }

    fn skipped(question_id: &str, seed: u64, reason: SkipReason) -> Self {
        Self {
            applied: false,
            skip_reason: Some(reason),
            ..Self::applied(question_id, seed)
        }
    }
}

/// Which half of the question e2 inserts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfSide {
    #[default]
    First,
    Last,
}

impl FromStr for HalfSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" => Ok(HalfSide::First),
            "last" => Ok(HalfSide::Last),
            other => Err(format!("unknown half {other:?} (expected first or last)")),
        }
    }
}

impl fmt::Display for HalfSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfSide::First => "first",
            HalfSide::Last => "last",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AblationOptions {
    pub half: HalfSide,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AblationError {
    #[error(
        "{ablation} needs exactly one question per paragraph ({offending} paragraphs differ); truncate the dataset first"
    )]
    TruncationRequired { ablation: AblationId, offending: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteMode {
    InterrogativesOnly,
    ShuffleWords,
}

/// Sentences that overlap none of the question's gold answers.
pub fn eligible_sentences(p: &Paragraph, qa: &Qa) -> Vec<usize> {
    split_sentences(&p.context)
        .iter()
        .enumerate()
        .filter(|(_, s)| !qa.answers.iter().any(|a| s.overlaps(a.answer_start, a.end())))
        .map(|(i, _)| i)
        .collect()
}

/// Prepends `payload` and one space to sentence `idx`, shifting every answer
/// that starts at or after the insertion point.
pub fn insert_before_sentence(p: &Paragraph, idx: usize, payload: &str) -> Paragraph {
    let sentences = split_sentences(&p.context);
    let at = sentences[idx].start;
    let head = char_slice(&p.context, 0, at).expect("sentence start lies within the context");
    let tail = &p.context[head.len()..];
    let context = format!("{head}{payload} {tail}");
    let shift = char_len(payload) + 1;
    let qas = p
        .qas
        .iter()
        .map(|qa| {
            let mut qa = qa.clone();
            for a in &mut qa.answers {
                if a.answer_start >= at {
                    a.answer_start += shift;
                }
            }
            qa
        })
        .collect();
    Paragraph { context, qas }
}

/// Permutes the paragraph's sentences with a seeded Fisher–Yates shuffle and
/// rejoins them with single spaces, remapping answer offsets.
///
/// Fails with [`SkipReason::AnswerCrossesSentenceBoundary`] when some gold
/// answer does not lie inside a single sentence.
pub fn shuffle_paragraph_sentences(p: &Paragraph, seed: u64) -> Result<Paragraph, SkipReason> {
    let sentences = split_sentences(&p.context);
    let mut homes = Vec::new();
    for qa in &p.qas {
        for a in &qa.answers {
            let home = sentences
                .iter()
                .position(|s| s.contains_range(a.answer_start, a.end()))
                .ok_or(SkipReason::AnswerCrossesSentenceBoundary)?;
            homes.push(home);
        }
    }
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    SplitMix64::new(seed).shuffle(&mut order);

    let mut new_start = vec![0; sentences.len()];
    let mut pieces = Vec::with_capacity(sentences.len());
    let mut cursor = 0;
    for &old in &order {
        let s = sentences[old];
        new_start[old] = cursor;
        pieces.push(char_slice(&p.context, s.start, s.end).expect("sentence within context"));
        cursor += s.len() + 1;
    }
    let context = pieces.join(" ");

    let mut homes = homes.into_iter();
    let qas = p
        .qas
        .iter()
        .map(|qa| {
            let mut qa = qa.clone();
            for a in &mut qa.answers {
                let home = homes.next().expect("one home per answer");
                a.answer_start = new_start[home] + (a.answer_start - sentences[home].start);
            }
            qa
        })
        .collect();
    Ok(Paragraph { context, qas })
}

/// Rewrites the question only; context and answers are untouched.
pub fn rewrite_question(qa: &Qa, mode: RewriteMode, seed: u64) -> Qa {
    let question = match mode {
        RewriteMode::InterrogativesOnly => extract_interrogatives(&qa.question).join(" "),
        RewriteMode::ShuffleWords => {
            let mut words: Vec<String> = tokenize(&qa.question).into_iter().map(|t| t.text).collect();
            SplitMix64::new(seed).shuffle(&mut words);
            words.join(" ")
        }
    };
    Qa {
        question,
        ..qa.clone()
    }
}

fn half_question(question: &str, side: HalfSide) -> String {
    let tokens: Vec<String> = tokenize(question).into_iter().map(|t| t.text).collect();
    let keep = tokens.len().div_ceil(2);
    let range = match side {
        HalfSide::First => &tokens[..keep],
        HalfSide::Last => &tokens[tokens.len() - keep..],
    };
    range.join(" ")
}

fn insertion_payload(id: AblationId, question: &str, opts: AblationOptions) -> String {
    match id {
        AblationId::E1 => question.split_whitespace().collect::<Vec<_>>().join(" "),
        AblationId::E2 => half_question(question, opts.half),
        AblationId::E6 => extract_keywords(question, PosClass::Noun).join(" "),
        AblationId::E7 => extract_keywords(question, PosClass::Verb).join(" "),
        AblationId::E8 => extract_keywords(question, PosClass::Adjective).join(" "),
        _ => unreachable!("{id} is not an insertion ablation"),
    }
}

fn perturb_paragraph(
    p: &Paragraph,
    id: AblationId,
    global_seed: u64,
    opts: AblationOptions,
) -> (Paragraph, Vec<PerturbationRecord>) {
    match id {
        AblationId::E3 => {
            let Some(first) = p.qas.first() else {
                return (p.clone(), Vec::new());
            };
            let seed = derive_seed(global_seed, &first.id);
            match shuffle_paragraph_sentences(p, seed) {
                Ok(shuffled) => {
                    let records = p.qas.iter().map(|qa| PerturbationRecord::applied(&qa.id, seed)).collect();
                    (shuffled, records)
                }
                Err(reason) => {
                    let records = p
                        .qas
                        .iter()
                        .map(|qa| PerturbationRecord::skipped(&qa.id, seed, reason))
                        .collect();
                    (p.clone(), records)
                }
            }
        }
        AblationId::E4 | AblationId::E5 => {
            let mode = if id == AblationId::E4 {
                RewriteMode::InterrogativesOnly
            } else {
                RewriteMode::ShuffleWords
            };
            let mut out = p.clone();
            let mut records = Vec::with_capacity(p.qas.len());
            for qa in &mut out.qas {
                let seed = derive_seed(global_seed, &qa.id);
                *qa = rewrite_question(qa, mode, seed);
                records.push(if mode == RewriteMode::InterrogativesOnly && qa.question.is_empty() {
                    PerturbationRecord::skipped(&qa.id, seed, SkipReason::EmptyPayload)
                } else {
                    PerturbationRecord::applied(&qa.id, seed)
                });
            }
            (out, records)
        }
        _ => {
            // Truncated input: exactly one question per paragraph.
            let qa = &p.qas[0];
            let seed = derive_seed(global_seed, &qa.id);
            let eligible = eligible_sentences(p, qa);
            if eligible.is_empty() {
                let rec = PerturbationRecord::skipped(&qa.id, seed, SkipReason::NoEligibleSentence);
                return (p.clone(), vec![rec]);
            }
            let payload = insertion_payload(id, &qa.question, opts);
            if payload.is_empty() {
                let rec = PerturbationRecord::skipped(&qa.id, seed, SkipReason::EmptyPayload);
                return (p.clone(), vec![rec]);
            }
            let target = eligible[SplitMix64::new(seed).below(eligible.len())];
            let out = insert_before_sentence(p, target, &payload);
            let rec = PerturbationRecord {
                target_sentence_index: Some(target),
                inserted_text: Some(payload),
                ..PerturbationRecord::applied(&qa.id, seed)
            };
            (out, vec![rec])
        }
    }
}

/// Applies one ablation to every question of `d`, returning the perturbed
/// dataset and one record per question in document order.
///
/// Insertion ablations (e1, e2, e6, e7, e8) require a truncated dataset.
pub fn apply_ablation(
    d: &Dataset,
    id: AblationId,
    global_seed: u64,
    opts: AblationOptions,
) -> Result<(Dataset, Vec<PerturbationRecord>), AblationError> {
    if id.spec().requires_truncated && !is_truncated(d) {
        let offending = d.paragraphs().filter(|p| p.qas.len() != 1).count();
        return Err(AblationError::TruncationRequired { ablation: id, offending });
    }
    let per_article: Vec<(Article, Vec<PerturbationRecord>)> = d
        .articles
        .par_iter()
        .map(|article| {
            let results: Vec<(Paragraph, Vec<PerturbationRecord>)> = article
                .paragraphs
                .par_iter()
                .map(|p| perturb_paragraph(p, id, global_seed, opts))
                .collect();
            let mut paragraphs = Vec::with_capacity(results.len());
            let mut records = Vec::new();
            for (p, r) in results {
                paragraphs.push(p);
                records.extend(r);
            }
            (Article { title: article.title.clone(), paragraphs }, records)
        })
        .collect();
    let mut articles = Vec::with_capacity(per_article.len());
    let mut records = Vec::with_capacity(d.question_count());
    for (a, r) in per_article {
        articles.push(a);
        records.extend(r);
    }
    Ok((Dataset { version: d.version.clone(), articles }, records))
}

/// JSON lines, one record per line.
pub fn records_to_jsonl(records: &[PerturbationRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serialization cannot fail");
        out.push(b'\n');
    }
    out
}

pub fn records_from_jsonl(bytes: &[u8]) -> Result<Vec<PerturbationRecord>, serde_json::Error> {
    serde_json::Deserializer::from_slice(bytes)
        .into_iter::<PerturbationRecord>()
        .collect()
}
