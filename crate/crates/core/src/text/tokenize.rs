use serde::{Deserialize, Serialize};

use super::lexicon;

/// A token and its position in the source, in characters (Unicode scalar values).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpan {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Punctuation as the tokenizer sees it: ASCII punctuation plus the common
/// typographic marks found in encyclopedic text.
pub fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c,
            '\u{00A1}' | '\u{00A7}' | '\u{00AB}' | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}'
            | '\u{2010}'..='\u{2027}'
            | '\u{2030}'..='\u{205E}'
            | '\u{3001}'..='\u{3003}'
            | '\u{3008}'..='\u{3011}'
        )
}

/// Splits on Unicode whitespace, then peels leading and trailing punctuation
/// into single-character tokens.
///
/// A trailing period stays attached when the remaining word already contains
/// a period (`U.S.`, `e.g.`) or is a known abbreviation (`Mr.`, `etc.`).
pub fn tokenize(s: &str) -> Vec<TokenSpan> {
    let chars: Vec<char> = s.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let chunk_start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, chunk_start, i, &mut tokens);
    }
    tokens
}

fn split_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<TokenSpan>) {
    let mut lead = start;
    while lead < end && is_punct(chars[lead]) {
        out.push(span(chars, lead, lead + 1));
        lead += 1;
    }
    if lead == end {
        return;
    }
    let mut trail = end;
    while trail > lead && is_punct(chars[trail - 1]) {
        trail -= 1;
    }
    if trail < end && chars[trail] == '.' {
        let core: String = chars[lead..trail].iter().collect();
        if core.contains('.') || lexicon::is_abbreviation(&format!("{core}.")) {
            trail += 1;
        }
    }
    out.push(span(chars, lead, trail));
    for k in trail..end {
        out.push(span(chars, k, k + 1));
    }
}

fn span(chars: &[char], start: usize, end: usize) -> TokenSpan {
    TokenSpan {
        text: chars[start..end].iter().collect(),
        start,
        end,
    }
}

/// Byte offset of the character at `char_idx` (or `s.len()` at the end).
/// Returns `None` past the end.
pub fn byte_offset(s: &str, char_idx: usize) -> Option<usize> {
    if char_idx == 0 {
        return Some(0);
    }
    let mut seen = 0;
    for (b, _) in s.char_indices() {
        if seen == char_idx {
            return Some(b);
        }
        seen += 1;
    }
    (seen == char_idx).then_some(s.len())
}

/// Substring by character offsets `[start, end)`.
pub fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let b0 = byte_offset(s, start)?;
    let b1 = b0 + byte_offset(&s[b0..], end - start)?;
    Some(&s[b0..b1])
}

pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(texts("What is fast?"), ["What", "is", "fast", "?"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \t\n").is_empty());
    }

    #[test]
    fn keeps_internal_periods() {
        assert_eq!(texts("U.S. grew"), ["U.S.", "grew"]);
        assert_eq!(texts("Mr. Smith"), ["Mr.", "Smith"]);
        assert_eq!(texts("(U.S.)"), ["(", "U.S.", ")"]);
    }

    #[test]
    fn leading_punctuation_and_quotes() {
        assert_eq!(texts("\"Hello,\" she said."), ["\"", "Hello", ",", "\"", "she", "said", "."]);
        assert_eq!(texts("...") , [".", ".", "."]);
    }

    #[test]
    fn offsets_are_in_characters() {
        let toks = tokenize("Café déjà-vu!");
        assert_eq!(toks[0], TokenSpan { text: "Café".into(), start: 0, end: 4 });
        assert_eq!(toks[1].start, 5);
        assert_eq!(toks[1].text, "déjà-vu");
        assert_eq!(toks[2].text, "!");
        assert_eq!(toks[2].start, 12);
    }

    #[test]
    fn char_slicing() {
        assert_eq!(char_slice("naïve test", 2, 5), Some("ïve"));
        assert_eq!(char_slice("abc", 3, 3), Some(""));
        assert_eq!(char_slice("abc", 2, 4), None);
        assert_eq!(byte_offset("ïa", 1), Some(2));
        assert_eq!(byte_offset("ïa", 2), Some(3));
        assert_eq!(byte_offset("ïa", 3), None);
    }
}
