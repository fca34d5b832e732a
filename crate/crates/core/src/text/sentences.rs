use serde::{Deserialize, Serialize};

use super::lexicon;
use super::tokenize::is_punct;

/// A sentence as character offsets `[start, end)` into its paragraph.
///
/// The spans returned by [`split_sentences`] cover the whole context: the
/// first starts at 0, the last ends at the context length, and the gaps
/// between consecutive spans are whitespace only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
}

impl SentenceSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Whether `[start, end)` overlaps this sentence. A zero-length range
    /// overlaps the sentence containing its position.
    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        let end = end.max(start + 1);
        start < self.end && self.start < end
    }

    pub fn contains_range(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }
}

const TERMINATORS: [char; 3] = ['.', '?', '!'];
const CLOSERS: [char; 7] = ['"', '\'', '\u{201D}', '\u{2019}', ')', ']', '\u{00BB}'];
const OPENERS: [char; 5] = ['"', '\'', '\u{201C}', '\u{2018}', '\u{00AB}'];

/// Rule-based sentence boundaries.
///
/// A boundary falls after `.`, `?` or `!` (plus any closing quotes or
/// brackets) when followed by whitespace and then an uppercase letter or an
/// opening quote. A period ending a bundled abbreviation or a single-letter
/// initial (`J.`) never splits.
pub fn split_sentences(context: &str) -> Vec<SentenceSpan> {
    let chars: Vec<char> = context.chars().collect();
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spans = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < n {
        if TERMINATORS.contains(&chars[i]) {
            if let Some((end, next)) = boundary_at(&chars, i) {
                spans.push(SentenceSpan { start, end });
                start = next;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    spans.push(SentenceSpan { start, end: n });
    spans
}

/// If the terminator at `i` ends a sentence, returns (sentence end, next sentence start).
fn boundary_at(chars: &[char], i: usize) -> Option<(usize, usize)> {
    let n = chars.len();
    let mut end = i + 1;
    while end < n && CLOSERS.contains(&chars[end]) {
        end += 1;
    }
    if end >= n || !chars[end].is_whitespace() {
        return None;
    }
    let mut next = end;
    while next < n && chars[next].is_whitespace() {
        next += 1;
    }
    if next >= n {
        return None;
    }
    let c = chars[next];
    if !(c.is_uppercase() || OPENERS.contains(&c)) {
        return None;
    }
    if chars[i] == '.' && period_is_abbreviation(chars, i) {
        return None;
    }
    Some((end, next))
}

fn period_is_abbreviation(chars: &[char], i: usize) -> bool {
    let mut w = i;
    while w > 0 && !chars[w - 1].is_whitespace() {
        w -= 1;
    }
    while w < i && is_punct(chars[w]) && chars[w] != '.' {
        w += 1;
    }
    let word: String = chars[w..=i].iter().collect();
    let is_initial = i - w == 1 && chars[w].is_uppercase();
    is_initial || lexicon::is_abbreviation(&word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans(s: &str) -> Vec<(usize, usize)> {
        split_sentences(s).iter().map(|s| (s.start, s.end)).collect()
    }

    #[test]
    fn two_simple_sentences() {
        assert_eq!(spans("Rust is fast. Go is simple."), [(0, 13), (14, 27)]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        assert_eq!(spans("One sentence only"), [(0, 17)]);
        assert!(spans("").is_empty());
    }

    #[test]
    fn abbreviation_suppresses_split() {
        assert_eq!(spans("Mr. Smith left. He ran."), [(0, 15), (16, 23)]);
        assert_eq!(spans("It is in the U.S. Army now."), [(0, 27)]);
        assert_eq!(spans("Written by J. R. R. Tolkien. Published later."), [(0, 28), (29, 45)]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(spans("It cost 3.5 million. it rose."), [(0, 29)]);
    }

    #[test]
    fn questions_exclamations_and_quotes() {
        assert_eq!(spans("Who won? The Broncos!"), [(0, 8), (9, 21)]);
        assert_eq!(spans("He said \"Stop.\" Then left."), [(0, 15), (16, 26)]);
        assert_eq!(spans("End. \"Quoted\" start."), [(0, 4), (5, 20)]);
    }

    #[test]
    fn whitespace_gaps_are_preserved() {
        let s = "  First one.\n\nSecond one.  ";
        let sp = split_sentences(s);
        assert_eq!(sp.first().unwrap().start, 0);
        assert_eq!(sp.last().unwrap().end, s.chars().count());
        assert_eq!(sp.len(), 2);
    }

    #[test]
    fn overlap_rules() {
        let s = SentenceSpan { start: 5, end: 10 };
        assert!(s.overlaps(9, 12));
        assert!(!s.overlaps(10, 12));
        assert!(!s.overlaps(0, 5));
        assert!(s.overlaps(5, 5));
        assert!(s.contains_range(5, 10));
        assert!(!s.contains_range(4, 6));
    }
}
