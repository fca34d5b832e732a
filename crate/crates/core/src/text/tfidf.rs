use std::collections::BTreeMap;

use super::normalize::normalized_tokens;

/// TF-IDF weights fitted on one collection of documents (the sentences of a
/// paragraph).
///
/// * `tf`  = raw count of the normalized token in the text
/// * `idf` = ln((1 + N) / (1 + df)) + 1, with `N` documents and `df` the
///   number of documents containing the term; unseen terms get df = 0
/// * vectors are compared by cosine (L2-normalized dot product)
#[derive(Debug, Clone)]
pub struct TfidfModel {
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    document_count: usize,
}

/// Sparse TF-IDF vector, sorted by term.
pub type TermVector = Vec<(String, f64)>;

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(documents: &[S]) -> Self {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in documents {
            let mut terms = normalized_tokens(doc.as_ref());
            terms.sort();
            terms.dedup();
            for t in terms {
                *df.entry(t).or_default() += 1;
            }
        }
        let document_count = documents.len();
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (idx, (term, count)) in df.into_iter().enumerate() {
            vocabulary.insert(term, idx);
            idf.push(smoothed_idf(document_count, count));
        }
        Self { vocabulary, idf, document_count }
    }

    pub fn document_count(&self) -> usize {
        self.document_count
    }

    pub fn vocabulary_len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn idf(&self, term: &str) -> f64 {
        match self.vocabulary.get(term) {
            Some(&i) => self.idf[i],
            None => smoothed_idf(self.document_count, 0),
        }
    }

    pub fn vectorize(&self, text: &str) -> TermVector {
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in normalized_tokens(text) {
            *tf.entry(t).or_default() += 1;
        }
        tf.into_iter()
            .map(|(term, count)| {
                let w = f64::from(count) * self.idf(&term);
                (term, w)
            })
            .collect()
    }

    /// Cosine similarity in `[0, 1]`; 0 when either side has no terms.
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        cosine(&self.vectorize(a), &self.vectorize(b))
    }
}

fn smoothed_idf(n: usize, df: usize) -> f64 {
    ((1.0 + n as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Cosine of two sorted sparse vectors. Symmetric by construction: the
/// merge visits shared terms in the same order either way round.
pub fn cosine(a: &TermVector, b: &TermVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let norm = |v: &TermVector| v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Convenience wrapper matching the free-function shape used elsewhere.
pub fn tfidf_similarity(model: &TfidfModel, a: &str, b: &str) -> f64 {
    model.similarity(a, b)
}
