//! SQuAD v1.1 datasets: parsing, validation, serialization and truncation.
//!
//! Answer offsets are counted in characters (Unicode scalar values), the way
//! the reference dataset was produced.
//!
//! Serialized output is compact JSON with a fixed key order:
//! `version`, `data`; `title`, `paragraphs`; `context`, `qas`;
//! `id`, `question`, `answers`; `text`, `answer_start`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::text::char_slice;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub version: String,
    #[serde(rename = "data")]
    pub articles: Vec<Article>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub context: String,
    pub qas: Vec<Qa>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qa {
    pub id: String,
    pub question: String,
    pub answers: Vec<Answer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    pub answer_start: usize,
}

impl Answer {
    pub fn end(&self) -> usize {
        self.answer_start + self.text.chars().count()
    }
}

impl Qa {
    pub fn gold_texts(&self) -> Vec<&str> {
        self.answers.iter().map(|a| a.text.as_str()).collect()
    }
}

impl Dataset {
    pub fn paragraphs(&self) -> impl Iterator<Item = &Paragraph> {
        self.articles.iter().flat_map(|a| a.paragraphs.iter())
    }

    pub fn paragraphs_mut(&mut self) -> impl Iterator<Item = &mut Paragraph> {
        self.articles.iter_mut().flat_map(|a| a.paragraphs.iter_mut())
    }

    /// Every question with its paragraph, in document order.
    pub fn questions(&self) -> impl Iterator<Item = (&Paragraph, &Qa)> {
        self.paragraphs().flat_map(|p| p.qas.iter().map(move |qa| (p, qa)))
    }

    pub fn question_count(&self) -> usize {
        self.paragraphs().map(|p| p.qas.len()).sum()
    }

    pub fn paragraph_count(&self) -> usize {
        self.paragraphs().count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SquadError {
    #[error("malformed JSON at byte {position} (line {line}, column {column}): {message}")]
    Json {
        position: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate question id(s): {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
}

fn schema(path: &str, message: impl Into<String>) -> SquadError {
    SquadError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn json_error(bytes: &[u8], err: &serde_json::Error) -> SquadError {
    let (line, column) = (err.line(), err.column());
    let line_start: usize = bytes
        .split(|&b| b == b'\n')
        .take(line.saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum();
    SquadError::Json {
        position: (line_start + column.saturating_sub(1)).min(bytes.len()),
        line,
        column,
        message: err.to_string(),
    }
}

/// Parses SQuAD v1.1 JSON. SQuAD v2.0 files (`is_impossible`,
/// `plausible_answers`) are rejected.
pub fn parse_dataset(bytes: &[u8]) -> Result<Dataset, SquadError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| json_error(bytes, &e))?;
    let root = object(&root, "$")?;
    let version = string_field(root, "$", "version")?;
    let data = array_field(root, "$", "data")?;
    let mut articles = Vec::with_capacity(data.len());
    for (ai, article) in data.iter().enumerate() {
        let path = format!("$.data[{ai}]");
        let article = object(article, &path)?;
        let title = string_field(article, &path, "title")?;
        let mut paragraphs = Vec::new();
        for (pi, paragraph) in array_field(article, &path, "paragraphs")?.iter().enumerate() {
            paragraphs.push(parse_paragraph(paragraph, &format!("{path}.paragraphs[{pi}]"))?);
        }
        articles.push(Article { title, paragraphs });
    }
    let dataset = Dataset { version, articles };
    let dups = duplicate_ids(&dataset);
    if !dups.is_empty() {
        let mut ids: Vec<String> = dups.into_iter().map(|(id, _)| id).collect();
        ids.dedup();
        return Err(SquadError::DuplicateIds(ids));
    }
    Ok(dataset)
}

fn parse_paragraph(value: &Value, path: &str) -> Result<Paragraph, SquadError> {
    let obj = object(value, path)?;
    let context = string_field(obj, path, "context")?;
    if context.is_empty() {
        return Err(schema(&format!("{path}.context"), "context must be non-empty"));
    }
    let mut qas = Vec::new();
    for (qi, qa) in array_field(obj, path, "qas")?.iter().enumerate() {
        let qpath = format!("{path}.qas[{qi}]");
        let qobj = object(qa, &qpath)?;
        for v2_key in ["is_impossible", "plausible_answers"] {
            if qobj.contains_key(v2_key) {
                return Err(schema(
                    &format!("{qpath}.{v2_key}"),
                    "SQuAD v2.0 unanswerable questions are not supported",
                ));
            }
        }
        let id = string_field(qobj, &qpath, "id")?;
        let question = string_field(qobj, &qpath, "question")?;
        let raw_answers = array_field(qobj, &qpath, "answers")?;
        if raw_answers.is_empty() {
            return Err(schema(&format!("{qpath}.answers"), "at least one answer is required"));
        }
        let mut answers = Vec::with_capacity(raw_answers.len());
        for (ni, answer) in raw_answers.iter().enumerate() {
            let apath = format!("{qpath}.answers[{ni}]");
            let aobj = object(answer, &apath)?;
            let text = string_field(aobj, &apath, "text")?;
            let start = aobj
                .get("answer_start")
                .ok_or_else(|| schema(&apath, "missing required key \"answer_start\""))?;
            let answer_start = start
                .as_u64()
                .and_then(|v| usize::try_from(v).ok())
                .ok_or_else(|| {
                    schema(&format!("{apath}.answer_start"), "expected a non-negative integer")
                })?;
            answers.push(Answer { text, answer_start });
        }
        qas.push(Qa { id, question, answers });
    }
    Ok(Paragraph { context, qas })
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SquadError> {
    value
        .as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, SquadError> {
    obj.get(key)
        .ok_or_else(|| schema(path, format!("missing required key {key:?}")))
}

fn string_field(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String, SquadError> {
    field(obj, path, key)?
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "expected a string"))
}

fn array_field<'a>(
    obj: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> Result<&'a Vec<Value>, SquadError> {
    field(obj, path, key)?
        .as_array()
        .ok_or_else(|| schema(&format!("{path}.{key}"), "expected an array"))
}

/// Compact JSON with the fixed key order documented at the module level.
pub fn serialize_dataset(d: &Dataset) -> Vec<u8> {
    serde_json::to_vec(d).expect("dataset serialization cannot fail")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SpanMismatch {
        question_id: String,
        answer_index: usize,
        answer_start: usize,
        expected: String,
        found: Option<String>,
    },
    DuplicateId {
        question_id: String,
        occurrence: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SpanMismatch {
                question_id,
                answer_index,
                answer_start,
                expected,
                found,
            } => match found {
                Some(found) => write!(
                    f,
                    "{question_id}: answer {answer_index} at {answer_start} expects {expected:?} but context has {found:?}"
                ),
                None => write!(
                    f,
                    "{question_id}: answer {answer_index} at {answer_start} ({expected:?}) runs past the end of the context"
                ),
            },
            Violation::DuplicateId {
                question_id,
                occurrence,
            } => write!(f, "{question_id}: duplicate question id (occurrence {occurrence})"),
        }
    }
}

fn duplicate_ids(d: &Dataset) -> Vec<(String, usize)> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut dups = Vec::new();
    for (_, qa) in d.questions() {
        let count = seen.entry(qa.id.as_str()).or_default();
        *count += 1;
        if *count > 1 {
            dups.push((qa.id.clone(), *count));
        }
    }
    dups
}

/// One violation per answer whose span does not match its context and per
/// extra occurrence of a question id. Empty means valid.
pub fn validate_dataset(d: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    for p in d.paragraphs() {
        for qa in &p.qas {
            for (i, a) in qa.answers.iter().enumerate() {
                let found = char_slice(&p.context, a.answer_start, a.end());
                if found != Some(a.text.as_str()) {
                    out.push(Violation::SpanMismatch {
                        question_id: qa.id.clone(),
                        answer_index: i,
                        answer_start: a.answer_start,
                        expected: a.text.clone(),
                        found: found.map(str::to_owned),
                    });
                }
            }
        }
    }
    out.extend(
        duplicate_ids(d)
            .into_iter()
            .map(|(question_id, occurrence)| Violation::DuplicateId {
                question_id,
                occurrence,
            }),
    );
    out
}

/// Keeps only the first question of every paragraph and drops paragraphs
/// without questions.
pub fn truncate_dataset(d: &Dataset) -> Dataset {
    Dataset {
        version: d.version.clone(),
        articles: d
            .articles
            .iter()
            .map(|a| Article {
                title: a.title.clone(),
                paragraphs: a
                    .paragraphs
                    .iter()
                    .filter_map(|p| {
                        p.qas.first().map(|qa| Paragraph {
                            context: p.context.clone(),
                            qas: vec![qa.clone()],
                        })
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Whether every paragraph carries exactly one question.
pub fn is_truncated(d: &Dataset) -> bool {
    d.paragraphs().all(|p| p.qas.len() == 1)
}
