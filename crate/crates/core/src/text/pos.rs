use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::lexicon::{is_interrogative, is_stopword, lexicon_class};
use super::tokenize::{is_punct, tokenize, TokenSpan};

/// Coarse part of speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosClass {
    Noun,
    Verb,
    Adjective,
    Other,
}

impl PosClass {
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "NOUN" => Some(Self::Noun),
            "VERB" => Some(Self::Verb),
            "ADJ" => Some(Self::Adjective),
            "OTHER" => Some(Self::Other),
            _ => None,
        }
    }
}

/// Tags each token. Rules, first match wins:
///
/// 1. punctuation-only token, stopword or interrogative: `Other`
/// 2. capitalized token that is not the first token: `Noun`
/// 3. lexicon entry (case-insensitive)
/// 4. suffix: `-ing`, `-ed` give `Verb`; `-ous`, `-ful`, `-able`, `-ive`
///    give `Adjective`; `-ly` gives `Other`
/// 5. anything else with a letter or digit: `Noun`, otherwise `Other`
pub fn tag_pos(tokens: &[TokenSpan]) -> Vec<PosClass> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| tag_one(&t.text, i))
        .collect()
}

fn tag_one(word: &str, position: usize) -> PosClass {
    if word.chars().all(is_punct) || is_stopword(word) || is_interrogative(word) {
        return PosClass::Other;
    }
    if position > 0 && word.chars().next().is_some_and(char::is_uppercase) {
        return PosClass::Noun;
    }
    if let Some(class) = lexicon_class(word) {
        return class;
    }
    let lower = word.to_lowercase();
    let len = lower.chars().count();
    let ends = |suffix: &str, min_len: usize| len >= min_len && lower.ends_with(suffix);
    if ends("ing", 5) || ends("ed", 4) {
        PosClass::Verb
    } else if ends("ous", 5) || ends("ful", 5) || ends("able", 6) || ends("ive", 5) {
        PosClass::Adjective
    } else if ends("ly", 4) {
        PosClass::Other
    } else if word.chars().any(char::is_alphanumeric) {
        PosClass::Noun
    } else {
        PosClass::Other
    }
}

/// Question tokens of the given class, in order, without interrogatives,
/// stopwords or case-insensitive repeats.
pub fn extract_keywords(question: &str, class: PosClass) -> Vec<String> {
    let tokens = tokenize(question);
    let tags = tag_pos(&tokens);
    let mut seen = HashSet::new();
    tokens
        .into_iter()
        .zip(tags)
        .filter(|(t, tag)| *tag == class && !is_interrogative(&t.text) && !is_stopword(&t.text))
        .filter(|(t, _)| seen.insert(t.text.to_lowercase()))
        .map(|(t, _)| t.text)
        .collect()
}

/// The interrogative tokens of a question, original casing, in order.
pub fn extract_interrogatives(question: &str) -> Vec<String> {
    tokenize(question)
        .into_iter()
        .filter(|t| is_interrogative(&t.text))
        .map(|t| t.text)
        .collect()
}
