//! Deterministic text primitives: tokens, sentences, answer normalization,
//! TF-IDF similarity, coarse part-of-speech tags and seeded randomness.

pub mod lexicon;
pub mod normalize;
pub mod pos;
pub mod rng;
pub mod sentences;
pub mod tfidf;
pub mod tokenize;

pub use normalize::{normalize_answer, normalized_tokens};
pub use pos::{extract_interrogatives, extract_keywords, tag_pos, PosClass};
pub use rng::{derive_seed, SplitMix64};
pub use sentences::{split_sentences, SentenceSpan};
pub use tfidf::{tfidf_similarity, TfidfModel};
pub use tokenize::{char_len, char_slice, tokenize, TokenSpan};
