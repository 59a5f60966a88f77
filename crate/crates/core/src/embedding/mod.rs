//! Vectors over test block descriptions and exact cosine search.

mod external;
mod index;
mod lexical;

use serde::{Deserialize, Serialize};

pub use external::{EmbeddingServiceConfig, ExternalEmbedder};
pub use index::{
    build_index, build_index_with, leakage_exclusions, load_index, save_index, top_k, EmbedderSpec, IndexEntry, VectorIndex,
    INDEX_SCHEMA_VERSION,
};
pub use lexical::{embed_lexical, terms, LexicalEmbedder, Vocabulary};

use crate::http::HttpError;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("dimension mismatch: expected {expected}, got {got} (item {index})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        index: usize,
    },
    #[error("embedding batch failed at item {first_index}: {source}")]
    Batch {
        first_index: usize,
        #[source]
        source: HttpError,
    },
    #[error("malformed embedding response: {0}")]
    Response(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("duplicate block id {0} in index")]
    DuplicateId(String),
    #[error("missing credential: environment variable {0} is not set")]
    MissingKey(String),
    #[error("index file {path}: {reason}")]
    File { path: String, reason: String },
}

/// A real vector, L2-normalized unless all components are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
}

impl EmbeddingVector {
    /// Normalize a raw vector. A zero vector stays zero; check
    /// [`EmbeddingVector::is_zero`].
    pub fn normalized(mut values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub value: f64,
    /// Set when either side is the zero vector; `value` is then 0.
    pub degenerate: bool,
}

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<Similarity, EmbeddingError> {
    if a.dim() != b.dim() {
        return Err(EmbeddingError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
            index: 0,
        });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(Similarity {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(Similarity {
        value: (a.dot(b) / (na * nb)).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Produces vectors for batches of texts.
pub trait Embedder: Send + Sync {
    /// Names the embedder and its parameters, for cache invalidation.
    fn id(&self) -> String;
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbeddingError>;
}
