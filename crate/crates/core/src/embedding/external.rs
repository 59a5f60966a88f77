use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::http::{post_with_retry, ReqwestTransport, RetryPolicy, Transport};

use super::{Embedder, EmbeddingError, EmbeddingVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingServiceConfig {
    pub url: String,
    pub model: String,
    /// Environment variable holding the bearer token. Unset variable means
    /// no auth header.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub batch_size: usize,
    pub retry: RetryPolicy,
}

impl Default for EmbeddingServiceConfig {
    fn default() -> Self {
        Self {
            url: String::new(),
            model: String::new(),
            api_key_env: "EMBEDDING_API_KEY".to_string(),
            timeout_secs: 60,
            batch_size: 64,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Serialize)]
struct Request<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct Response {
    data: Vec<Datum>,
}

#[derive(Deserialize)]
struct Datum {
    embedding: Vec<f64>,
    #[serde(default)]
    index: Option<usize>,
}

/// Client for an HTTP embeddings endpoint speaking
/// `{model, input: [..]}` -> `{data: [{embedding: [..]}]}`.
pub struct ExternalEmbedder {
    config: EmbeddingServiceConfig,
    transport: Box<dyn Transport>,
    token: Option<String>,
}

impl ExternalEmbedder {
    pub fn new(config: EmbeddingServiceConfig) -> Result<Self, EmbeddingError> {
        let transport = ReqwestTransport::new(Duration::from_secs(config.timeout_secs))
            .map_err(|e| EmbeddingError::Response(e.to_string()))?;
        let token = std::env::var(&config.api_key_env).ok();
        Ok(Self::with_transport(config, Box::new(transport), token))
    }

    pub fn with_transport(config: EmbeddingServiceConfig, transport: Box<dyn Transport>, token: Option<String>) -> Self {
        Self {
            config,
            transport,
            token,
        }
    }

    fn embed_chunk(&self, chunk: &[String], offset: usize) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        let body = serde_json::to_string(&Request {
            model: &self.config.model,
            input: chunk,
        })
        .expect("request serializes");
        let delivered = post_with_retry(
            self.transport.as_ref(),
            &self.config.url,
            &body,
            self.token.as_deref(),
            &self.config.retry,
        )
        .map_err(|source| EmbeddingError::Batch {
            first_index: offset,
            source,
        })?;
        if delivered.attempts > 1 {
            log::info!("embedding batch at {offset} succeeded after {} attempts", delivered.attempts);
        }
        let mut resp: Response = serde_json::from_str(&delivered.reply.body)
            .map_err(|e| EmbeddingError::Response(e.to_string()))?;
        if resp.data.len() != chunk.len() {
            return Err(EmbeddingError::Response(format!(
                "{} vectors for {} inputs",
                resp.data.len(),
                chunk.len()
            )));
        }
        if resp.data.iter().all(|d| d.index.is_some()) {
            resp.data.sort_by_key(|d| d.index);
        }
        Ok(resp.data.into_iter().map(|d| d.embedding).collect())
    }
}

impl Embedder for ExternalEmbedder {
    fn id(&self) -> String {
        format!("external:{}@{}", self.config.model, self.config.url)
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbeddingError> {
        if texts.is_empty() {
            return Err(EmbeddingError::EmptyBatch);
        }
        let mut out = Vec::with_capacity(texts.len());
        let mut dim = None;
        for (n, chunk) in texts.chunks(self.config.batch_size.max(1)).enumerate() {
            let offset = n * self.config.batch_size.max(1);
            for (i, raw) in self.embed_chunk(chunk, offset)?.into_iter().enumerate() {
                let expected = *dim.get_or_insert(raw.len());
                if raw.len() != expected {
                    return Err(EmbeddingError::DimensionMismatch {
                        expected,
                        got: raw.len(),
                        index: offset + i,
                    });
                }
                out.push(EmbeddingVector::normalized(raw));
            }
        }
        Ok(out)
    }
}
