//! Pipeline configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingServiceConfig;
use crate::eval::MatchingMode;
use crate::ift::IftTrainConfig;
use crate::llm::LlmEndpointConfig;
use crate::model::CorpusConventions;
use crate::prompt::{PromptBudget, DEFAULT_INSTRUCTION};
use crate::split::SplitSelector;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbedderConfig {
    #[default]
    Lexical,
    External(EmbeddingServiceConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub repo_roots: Vec<PathBuf>,
    pub delimiters: CorpusConventions,
    pub include_constructors: bool,
    pub graph_path: PathBuf,
    pub index_path: PathBuf,
    pub report_dir: PathBuf,
    pub dataset_dir: PathBuf,
    pub budget: PromptBudget,
    /// Exemplars per prompt.
    pub k: usize,
    pub instruction: String,
    pub llm: LlmEndpointConfig,
    pub embedder: EmbedderConfig,
    pub split: SplitSelector,
    pub matching_mode: MatchingMode,
    pub ift: IftTrainConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            repo_roots: Vec::new(),
            delimiters: CorpusConventions::default(),
            include_constructors: false,
            graph_path: PathBuf::from("tcgen-out/graph.json"),
            index_path: PathBuf::from("tcgen-out/index.json"),
            report_dir: PathBuf::from("tcgen-out/reports"),
            dataset_dir: PathBuf::from("tcgen-out/dataset"),
            budget: PromptBudget::default(),
            k: 2,
            instruction: DEFAULT_INSTRUCTION.to_string(),
            llm: LlmEndpointConfig::default(),
            embedder: EmbedderConfig::default(),
            split: SplitSelector::default(),
            matching_mode: MatchingMode::default(),
            ift: IftTrainConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Parse TOML text. Relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, origin: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            path: origin.to_string(),
            message,
        };
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| invalid(e.to_string()))?;
        if let Some(key) = find_secret_key(&table) {
            return Err(invalid(format!(
                "{key}: credentials are read from environment variables only (LLM_API_KEY, or the embedder's api_key_env)"
            )));
        }
        let mut cfg: PipelineConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| invalid(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        cfg.validate().map_err(invalid)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, &path.display().to_string(), base)
    }

    pub fn resolve_paths(&mut self, base_dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !base_dir.as_os_str().is_empty() {
                *p = base_dir.join(&*p);
            }
        };
        for r in &mut self.repo_roots {
            fix(r);
        }
        fix(&mut self.graph_path);
        fix(&mut self.index_path);
        fix(&mut self.report_dir);
        fix(&mut self.dataset_dir);
        if let Some(script) = self.llm.base_url.strip_prefix("mock://script:") {
            let mut p = PathBuf::from(script);
            fix(&mut p);
            self.llm.base_url = format!("mock://script:{}", p.display());
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.budget.max_tokens == 0 {
            return Err("budget.max_tokens must be positive".into());
        }
        if self.delimiters.begin.is_empty() || self.delimiters.end.is_empty() {
            return Err("delimiters must be non-empty".into());
        }
        self.llm.validate().map_err(|e| e.to_string())?;
        self.split.validate()?;
        self.ift.validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn extract_options(&self) -> crate::analyzer::ExtractOptions {
        crate::analyzer::ExtractOptions {
            conventions: self.delimiters.clone(),
            include_constructors: self.include_constructors,
        }
    }

    pub fn prompt_options(&self) -> crate::prompt::PromptOptions {
        crate::prompt::PromptOptions {
            instruction: self.instruction.clone(),
            budget: self.budget.clone(),
            exemplars: self.k,
            exclude: Default::default(),
        }
    }
}

fn find_secret_key(table: &toml::Table) -> Option<String> {
    for (k, v) in table {
        let lower = k.to_ascii_lowercase();
        let secret = (lower.contains("api_key") && lower != "api_key_env") || lower == "token" || lower == "password";
        if secret {
            return Some(k.clone());
        }
        if let toml::Value::Table(t) = v {
            if let Some(inner) = find_secret_key(t) {
                return Some(format!("{k}.{inner}"));
            }
        }
    }
    None
}
