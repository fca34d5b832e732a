//! Bundled word lists. Each file is plain UTF-8, one entry per line; lines
//! starting with `#` are comments.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use super::pos::PosClass;

const ABBREVIATIONS_TXT: &str = include_str!("../../data/abbreviations.txt");
const STOPWORDS_TXT: &str = include_str!("../../data/stopwords.txt");
const POS_LEXICON_TSV: &str = include_str!("../../data/pos_lexicon.tsv");

/// The interrogative words kept by the interrogatives-only rewrite.
pub const INTERROGATIVES: [&str; 9] = [
    "what", "which", "who", "whom", "whose", "when", "where", "why", "how",
];

fn entries(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

static ABBREVIATIONS: LazyLock<HashSet<String>> =
    LazyLock::new(|| entries(ABBREVIATIONS_TXT).map(str::to_lowercase).collect());

static STOPWORDS: LazyLock<HashSet<String>> =
    LazyLock::new(|| entries(STOPWORDS_TXT).map(str::to_lowercase).collect());

static POS_LEXICON: LazyLock<HashMap<String, PosClass>> = LazyLock::new(|| {
    let mut map = HashMap::new();
    for line in entries(POS_LEXICON_TSV) {
        let (word, class) = line
            .split_once('\t')
            .unwrap_or_else(|| panic!("malformed lexicon line: {line:?}"));
        let class = PosClass::from_tag(class.trim())
            .unwrap_or_else(|| panic!("unknown class in lexicon line: {line:?}"));
        map.entry(word.to_lowercase()).or_insert(class);
    }
    map
});

pub fn is_abbreviation(word: &str) -> bool {
    ABBREVIATIONS.contains(&word.to_lowercase())
}

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(&word.to_lowercase())
}

pub fn is_interrogative(word: &str) -> bool {
    let lower = word.to_lowercase();
    INTERROGATIVES.contains(&lower.as_str())
}

pub fn lexicon_class(word: &str) -> Option<PosClass> {
    POS_LEXICON.get(&word.to_lowercase()).copied()
}
