//! Instruction fine-tuning dataset export and the LoRA training config.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::VectorIndex;
use crate::graph::CodeGraph;
use crate::prompt::{build_prompt, PromptError, PromptOptions, PromptTarget};
use crate::split::{Split, SplitSelector};

pub const SEQUENCE_START: &str = "<s>";
pub const SEQUENCE_END: &str = "</s>";

#[derive(Debug, thiserror::Error)]
pub enum IftError {
    #[error("the test split is held out and is never exported for training")]
    TestSplit,
    #[error("split {0} selects no blocks")]
    EmptySplit(Split),
    #[error("invalid train config override {key}={value}: {reason}")]
    Override { key: String, value: String, reason: String },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IftRecord {
    pub block_id: String,
    /// `<s>[INST] ... [/INST]`
    pub prompt: String,
    /// Ground-truth block body, dedented.
    pub completion: String,
    pub full_text: String,
    pub token_estimate: usize,
}

impl IftRecord {
    pub fn render_full(prompt: &str, completion: &str) -> String {
        format!("{prompt}\n{}\n{SEQUENCE_END}", completion.trim_end())
    }
}

/// LoRA hyperparameters for a PEFT training harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IftTrainConfig {
    pub task_type: String,
    #[serde(rename = "r")]
    pub lora_rank: u32,
    pub lora_alpha: u32,
    pub lora_dropout: f64,
    pub bias: String,
    pub context_length: usize,
    pub base_model: String,
}

impl Default for IftTrainConfig {
    fn default() -> Self {
        Self {
            task_type: "CAUSAL_LM".to_string(),
            lora_rank: 256,
            lora_alpha: 512,
            lora_dropout: 0.1,
            bias: "none".to_string(),
            context_length: 10_000,
            base_model: "mixtral-8x7b".to_string(),
        }
    }
}

impl IftTrainConfig {
    pub fn validate(&self) -> Result<(), IftError> {
        let bad = |key: &str, value: String, reason: &str| IftError::Override {
            key: key.into(),
            value,
            reason: reason.into(),
        };
        if self.task_type.is_empty() {
            return Err(bad("task_type", String::new(), "must not be empty"));
        }
        if self.lora_rank == 0 {
            return Err(bad("r", "0".into(), "must be positive"));
        }
        if self.lora_alpha == 0 {
            return Err(bad("lora_alpha", "0".into(), "must be positive"));
        }
        if !(0.0..1.0).contains(&self.lora_dropout) {
            return Err(bad("lora_dropout", self.lora_dropout.to_string(), "must be in [0, 1)"));
        }
        if !["none", "all", "lora_only"].contains(&self.bias.as_str()) {
            return Err(bad("bias", self.bias.clone(), "expected none, all or lora_only"));
        }
        if self.context_length == 0 {
            return Err(bad("context_length", "0".into(), "must be positive"));
        }
        Ok(())
    }

    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), IftError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, IftError>
        where
            T::Err: std::fmt::Display,
        {
            value.trim().parse().map_err(|e: T::Err| IftError::Override {
                key: key.into(),
                value: value.into(),
                reason: e.to_string(),
            })
        }
        match key {
            "task_type" => self.task_type = value.to_string(),
            "r" | "lora_rank" => self.lora_rank = parse(key, value)?,
            "lora_alpha" | "alpha" => self.lora_alpha = parse(key, value)?,
            "lora_dropout" | "dropout" => self.lora_dropout = parse(key, value)?,
            "bias" => self.bias = value.to_string(),
            "context_length" => self.context_length = parse(key, value)?,
            "base_model" => self.base_model = value.to_string(),
            _ => {
                return Err(IftError::Override {
                    key: key.into(),
                    value: value.into(),
                    reason: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

/// Defaults merged with `key=value` overrides, validated.
pub fn export_train_config(base: &IftTrainConfig, overrides: &[(String, String)]) -> Result<IftTrainConfig, IftError> {
    let mut cfg = base.clone();
    for (k, v) in overrides {
        cfg.apply_override(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportSummary {
    pub split: Split,
    pub selected: usize,
    pub written: usize,
    pub skipped_over_budget: usize,
    pub skipped_ids: Vec<String>,
}

/// Build records for every block of `split`, in block-id order. Records
/// whose full text exceeds `context_length` tokens are skipped. Exemplars
/// never come from the test split.
pub fn build_records(
    graph: &CodeGraph,
    index: &VectorIndex,
    selector: &SplitSelector,
    split: Split,
    opts: &PromptOptions,
    context_length: usize,
) -> Result<(Vec<IftRecord>, ExportSummary), IftError> {
    if split == Split::Test {
        return Err(IftError::TestSplit);
    }
    let mut ids: Vec<&str> = graph
        .blocks()
        .map(|b| b.block_id.as_str())
        .filter(|id| selector.contains(split, id))
        .collect();
    ids.sort_unstable();
    if ids.is_empty() {
        return Err(IftError::EmptySplit(split));
    }
    let mut opts = opts.clone();
    opts.exclude.extend(
        graph
            .blocks()
            .filter(|b| selector.assign(&b.block_id) == Split::Test)
            .map(|b| b.block_id.clone()),
    );
    let estimator = opts.budget.estimator()?;
    let built: Vec<Result<Option<IftRecord>, IftError>> = ids
        .par_iter()
        .map(|id| {
            let bundle = match build_prompt(&PromptTarget::Block(id.to_string()), graph, index, &opts) {
                Ok(b) => b,
                Err(PromptError::OverBudget { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let block = graph.block(id).expect("selected from graph");
            let prompt = format!("{SEQUENCE_START}{}", bundle.rendered);
            let completion = block.dedented_body();
            let full_text = IftRecord::render_full(&prompt, &completion);
            let token_estimate = estimator.estimate(&full_text);
            if token_estimate > context_length {
                return Ok(None);
            }
            Ok(Some(IftRecord {
                block_id: id.to_string(),
                prompt,
                completion: completion.trim_end().to_string(),
                full_text,
                token_estimate,
            }))
        })
        .collect();
    let mut records = Vec::new();
    let mut skipped_ids = Vec::new();
    for (id, r) in ids.iter().zip(built) {
        match r? {
            Some(rec) => records.push(rec),
            None => skipped_ids.push(id.to_string()),
        }
    }
    if !skipped_ids.is_empty() {
        log::warn!("{} records over the context length were skipped", skipped_ids.len());
    }
    let summary = ExportSummary {
        split,
        selected: ids.len(),
        written: records.len(),
        skipped_over_budget: skipped_ids.len(),
        skipped_ids,
    };
    Ok((records, summary))
}

pub fn records_to_jsonl(records: &[IftRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Write the split's records as JSON lines to `out`.
pub fn export_dataset(
    graph: &CodeGraph,
    index: &VectorIndex,
    selector: &SplitSelector,
    split: Split,
    opts: &PromptOptions,
    context_length: usize,
    out: &Path,
) -> Result<ExportSummary, IftError> {
    let (records, summary) = build_records(graph, index, selector, split, opts, context_length)?;
    crate::io::write_atomic(out, records_to_jsonl(&records).as_bytes()).map_err(|source| IftError::Io {
        path: out.display().to_string(),
        source,
    })?;
    Ok(summary)
}
