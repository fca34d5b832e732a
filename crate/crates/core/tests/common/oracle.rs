//! Independent re-implementation of the SQuAD answer metrics, written as a
//! literal port of the reference evaluation script (regex article removal,
//! Counter intersection). Empty token lists follow the
//! `int(gold_toks == pred_toks)` rule.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

const PUNCTUATION: &str = r##"!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~"##;

static ARTICLES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(a|an|the)\b").unwrap());

pub fn normalize(s: &str) -> String {
    let lower = s.to_lowercase();
    let no_punc: String = lower.chars().filter(|c| !PUNCTUATION.contains(*c)).collect();
    let no_art = ARTICLES.replace_all(&no_punc, " ");
    no_art.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tokens(s: &str) -> Vec<String> {
    normalize(s).split_whitespace().map(String::from).collect()
}

fn counter(toks: &[String]) -> HashMap<&str, i64> {
    let mut c = HashMap::new();
    for t in toks {
        *c.entry(t.as_str()).or_insert(0) += 1;
    }
    c
}

pub fn f1_score(prediction: &str, ground_truth: &str) -> f64 {
    let pred = tokens(prediction);
    let gold = tokens(ground_truth);
    if pred.is_empty() || gold.is_empty() {
        return f64::from(u8::from(pred == gold));
    }
    let pc = counter(&pred);
    let gc = counter(&gold);
    let num_same: i64 = pc
        .iter()
        .map(|(k, v)| (*v).min(*gc.get(k).unwrap_or(&0)))
        .sum();
    if num_same == 0 {
        return 0.0;
    }
    let precision = num_same as f64 / pred.len() as f64;
    let recall = num_same as f64 / gold.len() as f64;
    (2.0 * precision * recall) / (precision + recall)
}

pub fn exact_match_score(prediction: &str, ground_truth: &str) -> f64 {
    f64::from(u8::from(normalize(prediction) == normalize(ground_truth)))
}

pub fn metric_max_over_ground_truths(
    metric: fn(&str, &str) -> f64,
    prediction: &str,
    ground_truths: &[&str],
) -> f64 {
    ground_truths
        .iter()
        .map(|g| metric(prediction, g))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// (prediction, golds) pairs covering articles, punctuation, casing,
/// repeated tokens, multiple golds and empty strings.
pub fn cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("The Broncos", vec!["Broncos"]),
        ("Denver", vec!["Broncos"]),
        ("", vec![""]),
        ("", vec!["cat"]),
        ("cat", vec![""]),
        ("", vec!["the"]),
        ("a an the", vec![""]),
        ("the cat sat", vec!["cat"]),
        ("a b", vec!["c d"]),
        ("Denver Broncos", vec!["Denver Broncos", "The Denver Broncos", "Broncos"]),
        ("denver", vec!["Denver Broncos", "Broncos"]),
        ("Santa Clara, California", vec!["Levi's Stadium", "Santa Clara, California"]),
        ("Levis Stadium", vec!["Levi's Stadium"]),
        ("cat cat cat", vec!["cat"]),
        ("the the cat", vec!["cat the"]),
        ("U.S. Army", vec!["US army"]),
        ("1,000 people", vec!["1000"]),
        ("THE END!", vec!["end"]),
        ("another anthem", vec!["an other anthem"]),
        ("over 13,000", vec!["13,000", "over 13,000 houses"]),
        ("in May", vec!["May", "in May"]),
        ("Zürich", vec!["zürich"]),
        ("e.g. this", vec!["eg this"]),
        ("New-York City", vec!["new york city"]),
        ("(the) answer", vec!["answer"]),
        ("x y z w", vec!["y", "x y", "z w x y"]),
        ("   spaced    out  ", vec!["spaced out"]),
        ("state-of-the-art", vec!["stateoftheart"]),
    ]
}
