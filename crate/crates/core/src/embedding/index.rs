use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::check_major;
use crate::model::TestCodeBlock;

use super::{Embedder, EmbeddingError, EmbeddingServiceConfig, EmbeddingVector, ExternalEmbedder, LexicalEmbedder, Vocabulary};

pub const INDEX_SCHEMA_VERSION: &str = "1.0";

/// How the index vectors were produced; kept so that new queries can be
/// embedded the same way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbedderSpec {
    Lexical {
        vocab: Vocabulary,
        code_vocab: Vocabulary,
    },
    External {
        config: EmbeddingServiceConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub block_id: String,
    pub tcbd: String,
    pub vector: EmbeddingVector,
    /// Embedding of the block's code. Stored, not used for retrieval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_vector: Option<EmbeddingVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorIndex {
    pub schema_version: String,
    pub embedder_id: String,
    pub dim: usize,
    pub embedder: EmbedderSpec,
    /// Sorted by block id.
    pub entries: Vec<IndexEntry>,
}

impl VectorIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, block_id: &str) -> Option<&IndexEntry> {
        self.entries
            .binary_search_by(|e| e.block_id.as_str().cmp(block_id))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Embed a new query description with the embedder that built the index.
    pub fn embed_query(&self, text: &str) -> Result<EmbeddingVector, EmbeddingError> {
        let texts = [text.to_string()];
        let mut v = match &self.embedder {
            EmbedderSpec::Lexical { vocab, .. } => LexicalEmbedder { vocab: vocab.clone() }.embed(&texts)?,
            EmbedderSpec::External { config } => ExternalEmbedder::new(config.clone())?.embed(&texts)?,
        };
        let v = v.pop().ok_or_else(|| EmbeddingError::Response("no vector".into()))?;
        if !self.entries.is_empty() && v.dim() != self.dim {
            return Err(EmbeddingError::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
                index: 0,
            });
        }
        Ok(v)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("index serializes");
        s.push('\n');
        s
    }
}

/// Index descriptions with the default lexical embedder: one TF-IDF
/// vocabulary over descriptions (retrieval keys) and one over code bodies.
pub fn build_index(blocks: &[&TestCodeBlock]) -> Result<VectorIndex, EmbeddingError> {
    let keys: Vec<&str> = blocks.iter().map(|b| b.tcbd.as_str()).collect();
    let bodies: Vec<&str> = blocks.iter().map(|b| b.body.as_str()).collect();
    let key_embedder = LexicalEmbedder::fit(&keys);
    let code_embedder = LexicalEmbedder::fit(&bodies);
    let spec = EmbedderSpec::Lexical {
        vocab: key_embedder.vocab.clone(),
        code_vocab: code_embedder.vocab.clone(),
    };
    build_index_with(blocks, &key_embedder, Some(&code_embedder), spec)
}

pub fn build_index_with(
    blocks: &[&TestCodeBlock],
    key_embedder: &dyn Embedder,
    code_embedder: Option<&dyn Embedder>,
    spec: EmbedderSpec,
) -> Result<VectorIndex, EmbeddingError> {
    let mut sorted: Vec<&TestCodeBlock> = blocks.to_vec();
    sorted.sort_by(|a, b| a.block_id.cmp(&b.block_id));
    for w in sorted.windows(2) {
        if w[0].block_id == w[1].block_id {
            return Err(EmbeddingError::DuplicateId(w[0].block_id.clone()));
        }
    }
    let mut embedder_id = key_embedder.id();
    if sorted.is_empty() {
        return Ok(VectorIndex {
            schema_version: INDEX_SCHEMA_VERSION.to_string(),
            embedder_id,
            dim: 0,
            embedder: spec,
            entries: Vec::new(),
        });
    }
    let keys: Vec<String> = sorted.iter().map(|b| b.tcbd.clone()).collect();
    let vectors = key_embedder.embed(&keys)?;
    let code_vectors = match code_embedder {
        Some(e) => {
            embedder_id.push_str(&format!("+code:{}", e.id()));
            let bodies: Vec<String> = sorted.iter().map(|b| b.body.clone()).collect();
            e.embed(&bodies)?.into_iter().map(Some).collect()
        }
        None => vec![None; sorted.len()],
    };
    let dim = vectors[0].dim();
    if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.dim() != dim) {
        return Err(EmbeddingError::DimensionMismatch {
            expected: dim,
            got: v.dim(),
            index: i,
        });
    }
    for (b, v) in sorted.iter().zip(&vectors) {
        if v.is_zero() {
            log::warn!("zero embedding for block={} tcbd={:?}", b.block_id, b.tcbd);
        }
    }
    let entries = sorted
        .iter()
        .zip(vectors)
        .zip(code_vectors)
        .map(|((b, vector), code_vector)| IndexEntry {
            block_id: b.block_id.clone(),
            tcbd: b.tcbd.clone(),
            vector,
            code_vector,
        })
        .collect();
    Ok(VectorIndex {
        schema_version: INDEX_SCHEMA_VERSION.to_string(),
        embedder_id,
        dim,
        embedder: spec,
        entries,
    })
}

/// The ids a query block must never retrieve: itself and every block with
/// a byte-identical description.
pub fn leakage_exclusions(index: &VectorIndex, block_id: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::from([block_id.to_string()]);
    if let Some(entry) = index.entry(block_id) {
        out.extend(
            index
                .entries
                .iter()
                .filter(|e| e.tcbd == entry.tcbd)
                .map(|e| e.block_id.clone()),
        );
    }
    out
}

/// Exact cosine search. Results are ordered by descending score, ties by
/// ascending block id; excluded ids are never returned.
pub fn top_k(
    index: &VectorIndex,
    query: &EmbeddingVector,
    k: usize,
    exclude: &BTreeSet<String>,
) -> Result<Vec<(String, f64)>, EmbeddingError> {
    if k == 0 || index.is_empty() {
        return Ok(Vec::new());
    }
    if query.dim() != index.dim {
        return Err(EmbeddingError::DimensionMismatch {
            expected: index.dim,
            got: query.dim(),
            index: 0,
        });
    }
    // Stored vectors are unit or zero, so the dot product is the cosine.
    let qn = query.norm();
    let mut scored: Vec<(&str, f64)> = index
        .entries
        .iter()
        .filter(|e| !exclude.contains(&e.block_id))
        .map(|e| {
            let s = if qn == 0.0 { 0.0 } else { e.vector.dot(query) / qn };
            (e.block_id.as_str(), s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(id, s)| (id.to_string(), s)).collect())
}

pub fn save_index(index: &VectorIndex, path: &Path) -> Result<(), EmbeddingError> {
    crate::io::write_atomic(path, index.to_json().as_bytes()).map_err(|e| EmbeddingError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn load_index(path: &Path) -> Result<VectorIndex, EmbeddingError> {
    let err = |reason: String| EmbeddingError::File {
        path: path.display().to_string(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| err(format!("corrupt: {e}")))?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| err("missing schema_version".into()))?;
    check_major(version, INDEX_SCHEMA_VERSION).map_err(|v| err(format!("unsupported schema version {v}")))?;
    let index: VectorIndex = serde_json::from_value(value).map_err(|e| err(format!("corrupt: {e}")))?;
    if index.entries.iter().any(|e| e.vector.dim() != index.dim) {
        return Err(err("entry dimension differs from index dim".into()));
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn block(id: &str, tcbd: &str) -> TestCodeBlock {
        TestCodeBlock {
            block_id: id.into(),
            path: "p".into(),
            ordinal: 0,
            tcbd: tcbd.into(),
            body: format!("TestBegin(\"{tcbd}\");\nTestEnd();"),
            owner_method: "C#m()".into(),
            owner_class: "C".into(),
            invocations: BTreeSet::new(),
            line_count: 2,
            start_line: 1,
        }
    }

    fn toy() -> Vec<TestCodeBlock> {
        vec![
            block("b0", "Check power enabled"),
            block("b1", "Check power enabled on cell"),
            block("b2", "Check power disabled"),
            block("b3", "Verify line status"),
            block("b4", "Reset parameter value"),
        ]
    }

    fn index_of(blocks: &[TestCodeBlock]) -> VectorIndex {
        build_index(&blocks.iter().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn k_zero_and_k_beyond_size() {
        let idx = index_of(&toy());
        let q = idx.entry("b0").unwrap().vector.clone();
        assert!(top_k(&idx, &q, 0, &BTreeSet::new()).unwrap().is_empty());
        let ex = BTreeSet::from(["b0".to_string()]);
        let all = top_k(&idx, &q, 50, &ex).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|(id, _)| id != "b0"));
    }

    #[test]
    fn ties_break_by_block_id() {
        let idx = index_of(&toy());
        let q = idx.embed_query("nothing matches").unwrap();
        let got: Vec<String> = top_k(&idx, &q, 5, &BTreeSet::new()).unwrap().into_iter().map(|r| r.0).collect();
        assert_eq!(got, vec!["b0", "b1", "b2", "b3", "b4"]);
    }

    #[test]
    fn exclusions_cover_identical_descriptions() {
        let mut blocks = toy();
        blocks.push(block("b5", "Check power enabled"));
        let idx = index_of(&blocks);
        let ex = leakage_exclusions(&idx, "b0");
        assert_eq!(ex, BTreeSet::from(["b0".to_string(), "b5".to_string()]));
    }

    #[test]
    fn empty_index() {
        let idx = index_of(&[]);
        assert!(idx.is_empty());
        let q = EmbeddingVector { values: vec![] };
        assert!(top_k(&idx, &q, 2, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let blocks = [block("a", "x"), block("a", "y")];
        assert!(matches!(
            build_index(&blocks.iter().collect::<Vec<_>>()),
            Err(EmbeddingError::DuplicateId(_))
        ));
    }

    #[test]
    fn file_round_trip_is_byte_stable() {
        let idx = index_of(&toy());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("index.json");
        save_index(&idx, &p).unwrap();
        let back = load_index(&p).unwrap();
        assert_eq!(back, idx);
        assert_eq!(back.to_json(), std::fs::read_to_string(&p).unwrap());
        std::fs::write(&p, "{\"schema_version\":\"9.0\"}").unwrap();
        assert!(load_index(&p).is_err());
    }
}
