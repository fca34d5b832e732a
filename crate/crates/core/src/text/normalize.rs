/// SQuAD v1.1 answer normalization: lowercase, drop ASCII punctuation, drop
/// the articles `a`/`an`/`the` as whole words, collapse whitespace.
pub fn normalize_answer(s: &str) -> String {
    let lowered = s.to_lowercase();
    let no_punct: String = lowered.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    let no_articles = remove_articles(&no_punct);
    no_articles.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Normalized tokens, as used by TF-IDF and token F1.
pub fn normalized_tokens(s: &str) -> Vec<String> {
    normalize_answer(s)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

// Replaces every maximal word-character run equal to an article with a space.
fn remove_articles(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if matches!(word.as_str(), "a" | "an" | "the") {
            out.push(' ');
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in s.chars() {
        if is_word_char(c) {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn official_rules() {
        assert_eq!(normalize_answer("The Cat!"), "cat");
        assert_eq!(normalize_answer(""), "");
        assert_eq!(normalize_answer("a an the"), "");
        assert_eq!(normalize_answer("  Theater   of\tthe  Absurd "), "theater of absurd");
        assert_eq!(normalize_answer("Denver's"), "denvers");
        assert_eq!(normalize_answer("x-the-y"), "xthey");
    }

    #[test]
    fn articles_only_at_word_boundaries() {
        assert_eq!(normalize_answer("another anthem"), "another anthem");
        assert_eq!(normalize_answer("A (the) an."), "");
        assert_eq!(normalize_answer("the—end"), "—end");
    }

    #[test]
    fn token_view() {
        assert_eq!(normalized_tokens("The Broncos won!"), ["broncos", "won"]);
        assert!(normalized_tokens("?").is_empty());
    }
}
