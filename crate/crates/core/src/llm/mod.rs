//! Code generation through a chat-completions style endpoint, with
//! in-process backends for hermetic runs.

mod extract;
mod mock;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::analyzer::ExtractOptions;
use crate::http::{post_with_retry, HttpError, ReqwestTransport, RetryPolicy, Transport};
use crate::prompt::PromptBundle;

pub use extract::{extract_code, extract_code_with};
pub use mock::{drop_invocation, skeleton, GroundTruth, ScriptStep, ScriptTransport};

/// Environment variable holding the endpoint's bearer token.
pub const API_KEY_ENV: &str = "LLM_API_KEY";

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Http(#[from] HttpError),
    #[error("malformed completion response: {0}")]
    Response(String),
    #[error("no ground truth for block {0}")]
    MissingTruth(String),
}

impl LlmError {
    /// Errors that will recur on every request, so a batch should stop.
    pub fn is_fatal(&self) -> bool {
        matches!(self, LlmError::Config(_) | LlmError::Http(HttpError::Auth { .. }))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiMode {
    /// `{model, messages: [{role, content}]}` to `.../chat/completions`.
    #[default]
    Chat,
    /// `{model, prompt}` with the raw `<s>[INST]` template to `.../completions`.
    Completions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmEndpointConfig {
    /// `http(s)://...`, or `mock://echo`, `mock://dropper`, `mock://script:<path>`.
    pub base_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout_secs: u64,
    pub retry: RetryPolicy,
    pub api_mode: ApiMode,
    pub max_in_flight: usize,
}

impl Default for LlmEndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "mock://echo".to_string(),
            model_name: String::new(),
            temperature: 0.0,
            max_output_tokens: 1024,
            timeout_secs: 120,
            retry: RetryPolicy::default(),
            api_mode: ApiMode::Chat,
            max_in_flight: 4,
        }
    }
}

impl LlmEndpointConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.retry.max_attempts < 1 {
            return Err(LlmError::Config("retry.max_attempts must be at least 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(LlmError::Config("temperature must be >= 0".into()));
        }
        if self.max_in_flight < 1 {
            return Err(LlmError::Config("max_in_flight must be at least 1".into()));
        }
        Ok(())
    }

    fn endpoint_url(&self) -> String {
        let suffix = match self.api_mode {
            ApiMode::Chat => "/chat/completions",
            ApiMode::Completions => "/completions",
        };
        let base = self.base_url.trim_end_matches('/');
        if base.ends_with(suffix) {
            base.to_string()
        } else {
            format!("{base}{suffix}")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_id: Option<String>,
    pub raw_text: String,
    pub extracted_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
    pub latency_ms: u64,
    pub attempts: u32,
}

enum Backend {
    Http { transport: Box<dyn Transport>, url: String },
    Echo,
    Dropper,
}

/// A configured endpoint. Cheap to share across threads.
pub struct LlmGateway {
    config: LlmEndpointConfig,
    backend: Backend,
    token: Option<String>,
    truth: GroundTruth,
    extract: ExtractOptions,
}

impl LlmGateway {
    /// Build from config. `truth` feeds the echo and dropper backends and
    /// is ignored otherwise. The bearer token comes from `LLM_API_KEY`.
    pub fn new(config: LlmEndpointConfig, truth: GroundTruth, extract: ExtractOptions) -> Result<Self, LlmError> {
        config.validate()?;
        let backend = if let Some(rest) = config.base_url.strip_prefix("mock://") {
            match rest {
                "echo" => Backend::Echo,
                "dropper" => Backend::Dropper,
                _ => match rest.strip_prefix("script:") {
                    Some(path) => Backend::Http {
                        transport: Box::new(ScriptTransport::load(&PathBuf::from(path))?),
                        url: config.base_url.clone(),
                    },
                    None => return Err(LlmError::Config(format!("unknown mock backend {:?}", config.base_url))),
                },
            }
        } else if config.base_url.starts_with("http://") || config.base_url.starts_with("https://") {
            let transport = ReqwestTransport::new(Duration::from_secs(config.timeout_secs))
                .map_err(|e| LlmError::Config(e.to_string()))?;
            Backend::Http {
                transport: Box::new(transport),
                url: config.endpoint_url(),
            }
        } else {
            return Err(LlmError::Config(format!("unsupported base_url {:?}", config.base_url)));
        };
        let token = std::env::var(API_KEY_ENV).ok().filter(|t| !t.is_empty());
        Ok(Self {
            config,
            backend,
            token,
            truth,
            extract,
        })
    }

    /// Use a custom transport, e.g. a test double.
    pub fn with_transport(
        config: LlmEndpointConfig,
        transport: Box<dyn Transport>,
        token: Option<String>,
    ) -> Result<Self, LlmError> {
        config.validate()?;
        let url = config.endpoint_url();
        Ok(Self {
            config,
            backend: Backend::Http { transport, url },
            token,
            truth: GroundTruth::default(),
            extract: ExtractOptions::default(),
        })
    }

    pub fn config(&self) -> &LlmEndpointConfig {
        &self.config
    }

    pub fn extract_options(&self) -> &ExtractOptions {
        &self.extract
    }

    pub fn request_body(&self, bundle: &PromptBundle) -> String {
        let body = match self.config.api_mode {
            ApiMode::Chat => serde_json::json!({
                "model": self.config.model_name,
                "messages": [{"role": "user", "content": bundle.rendered}],
                "temperature": self.config.temperature,
                "max_tokens": self.config.max_output_tokens,
            }),
            ApiMode::Completions => serde_json::json!({
                "model": self.config.model_name,
                "prompt": format!("<s>{}", bundle.rendered),
                "temperature": self.config.temperature,
                "max_tokens": self.config.max_output_tokens,
            }),
        };
        body.to_string()
    }

    fn truth_for(&self, bundle: &PromptBundle) -> Result<String, LlmError> {
        match &bundle.block_id {
            Some(id) => self
                .truth
                .bodies
                .get(id)
                .cloned()
                .ok_or_else(|| LlmError::MissingTruth(id.clone())),
            None => Ok(skeleton(&bundle.target_tcbd, &self.extract)),
        }
    }

    pub fn generate(&self, bundle: &PromptBundle) -> Result<GenerationResult, LlmError> {
        let started = Instant::now();
        let (raw_text, usage, attempts) = match &self.backend {
            Backend::Echo => (self.truth_for(bundle)?, None, 1),
            Backend::Dropper => (drop_invocation(&self.truth_for(bundle)?, &self.extract).0, None, 1),
            Backend::Http { transport, url } => {
                let body = self.request_body(bundle);
                let delivered = post_with_retry(transport.as_ref(), url, &body, self.token.as_deref(), &self.config.retry)?;
                let (text, usage) = parse_completion(&delivered.reply.body, self.config.api_mode)?;
                (text, usage, delivered.attempts)
            }
        };
        let latency_ms = started.elapsed().as_millis() as u64;
        log::debug!(
            "generated block={:?} attempts={attempts} latency_ms={latency_ms}",
            bundle.block_id
        );
        Ok(GenerationResult {
            block_id: bundle.block_id.clone(),
            extracted_code: extract_code_with(&raw_text, &self.extract.conventions),
            raw_text,
            usage,
            latency_ms,
            attempts,
        })
    }

    /// Generate for every bundle with at most `max_in_flight` concurrent
    /// requests. Results are in input order.
    pub fn generate_all(&self, bundles: &[PromptBundle]) -> Vec<Result<GenerationResult, LlmError>> {
        use rayon::prelude::*;
        let run = || bundles.par_iter().map(|b| self.generate(b)).collect();
        match rayon::ThreadPoolBuilder::new().num_threads(self.config.max_in_flight).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("thread pool unavailable ({e}); generating sequentially");
                bundles.iter().map(|b| self.generate(b)).collect()
            }
        }
    }
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    #[serde(default)]
    message: Option<Message>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

fn parse_completion(body: &str, mode: ApiMode) -> Result<(String, Option<Usage>), LlmError> {
    let resp: CompletionResponse = serde_json::from_str(body).map_err(|e| LlmError::Response(e.to_string()))?;
    let choice = resp
        .choices
        .into_iter()
        .next()
        .ok_or_else(|| LlmError::Response("no choices".into()))?;
    let chat = choice.message.and_then(|m| m.content);
    let text = match mode {
        ApiMode::Chat => chat.or(choice.text),
        ApiMode::Completions => choice.text.or(chat),
    }
    .ok_or_else(|| LlmError::Response("choice has no content".into()))?;
    Ok((text, resp.usage))
}
