use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Embedder, EmbeddingError, EmbeddingVector};

/// Split into lowercase terms at non-alphanumerics and camelCase
/// boundaries: `getHTTPStatus2` -> `get`, `http`, `status2`.
pub fn terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        let chars: Vec<char> = word.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (chars[i - 1], chars[i]);
            let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
            let boundary = (prev.is_lowercase() && cur.is_uppercase())
                || (prev.is_uppercase() && cur.is_uppercase() && next_lower);
            if boundary {
                out.push(chars[start..i].iter().collect::<String>().to_lowercase());
                start = i;
            }
        }
        out.push(chars[start..].iter().collect::<String>().to_lowercase());
    }
    out
}

/// Document frequencies over a corpus of texts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub n_docs: usize,
    /// term -> number of documents containing it; iteration order fixes
    /// the vector layout.
    pub doc_freq: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(docs: &[S]) -> Self {
        let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
        for d in docs {
            let mut seen: Vec<String> = terms(d.as_ref());
            seen.sort();
            seen.dedup();
            for t in seen {
                *doc_freq.entry(t).or_default() += 1;
            }
        }
        Self {
            n_docs: docs.len(),
            doc_freq,
        }
    }

    pub fn dim(&self) -> usize {
        self.doc_freq.len()
    }

    /// Smoothed inverse document frequency: `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, df: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
    }
}

/// TF-IDF vector of `text` over `vocab`, L2-normalized. Terms outside the
/// vocabulary are ignored; text with no known terms gives the zero vector.
pub fn embed_lexical(text: &str, vocab: &Vocabulary) -> EmbeddingVector {
    let mut tf: BTreeMap<String, usize> = BTreeMap::new();
    for t in terms(text) {
        *tf.entry(t).or_default() += 1;
    }
    let values = vocab
        .doc_freq
        .iter()
        .map(|(term, &df)| tf.get(term).map_or(0.0, |&n| n as f64 * vocab.idf(df)))
        .collect();
    EmbeddingVector::normalized(values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalEmbedder {
    pub vocab: Vocabulary,
}

impl LexicalEmbedder {
    pub fn fit<S: AsRef<str>>(docs: &[S]) -> Self {
        Self {
            vocab: Vocabulary::build(docs),
        }
    }
}

impl Embedder for LexicalEmbedder {
    fn id(&self) -> String {
        format!(
            "lexical-tfidf-v1:docs={}:terms={}",
            self.vocab.n_docs,
            self.vocab.dim()
        )
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbeddingError> {
        Ok(texts.iter().map(|t| embed_lexical(t, &self.vocab)).collect())
    }
}
