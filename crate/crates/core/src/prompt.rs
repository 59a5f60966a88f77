//! Prompt assembly: instruction, methods in scope, retrieved exemplars and
//! the target description, fitted to a token budget.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::embedding::{leakage_exclusions, top_k, EmbeddingError, VectorIndex};
use crate::graph::{CodeGraph, GraphError, ScopeEntry};

pub const DEFAULT_INSTRUCTION: &str = "You are an expert 5G network trace and test engineer and you are a Java \
programming expert. You are given a list of methods and example code blocks. Your task is to write a Java code \
block for a given test description";

pub const TASK_LINE: &str = "Write code for the below test description.";

pub const DEFAULT_MAX_TOKENS: usize = 10_000;

pub const DEFAULT_ESTIMATOR: &str = "chars/4";

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("token budget must be positive")]
    ZeroBudget,
    #[error("unknown token estimator {0:?}")]
    UnknownEstimator(String),
    #[error("prompt needs {needed} tokens after all truncation, budget is {max}")]
    OverBudget { needed: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Approximates the token count of a text.
pub trait TokenEstimator: Send + Sync {
    fn id(&self) -> String;
    fn estimate(&self, text: &str) -> usize;
}

/// `ceil(chars / n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharsPerToken(pub usize);

impl TokenEstimator for CharsPerToken {
    fn id(&self) -> String {
        format!("chars/{}", self.0)
    }

    fn estimate(&self, text: &str) -> usize {
        text.chars().count().div_ceil(self.0.max(1))
    }
}

/// Default estimate: one token per four characters, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    CharsPerToken(4).estimate(text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptBudget {
    pub max_tokens: usize,
    pub estimator_id: String,
}

impl Default for PromptBudget {
    fn default() -> Self {
        Self {
            max_tokens: DEFAULT_MAX_TOKENS,
            estimator_id: DEFAULT_ESTIMATOR.to_string(),
        }
    }
}

impl PromptBudget {
    pub fn new(max_tokens: usize) -> Self {
        Self {
            max_tokens,
            ..Default::default()
        }
    }

    pub fn estimator(&self) -> Result<Box<dyn TokenEstimator>, PromptError> {
        let n = self
            .estimator_id
            .strip_prefix("chars/")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|n| *n > 0)
            .ok_or_else(|| PromptError::UnknownEstimator(self.estimator_id.clone()))?;
        Ok(Box::new(CharsPerToken(n)))
    }
}

/// What to generate code for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptTarget {
    /// An existing block; it and its description twins are excluded from
    /// retrieval.
    Block(String),
    /// A new step to be placed in `path`, inside `class` or the file's
    /// first class.
    NewStep {
        tcbd: String,
        path: String,
        class: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub block_id: String,
    pub tcbd: String,
    pub body: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Imported classes whose stanzas were dropped, in import order.
    pub dropped_classes: Vec<String>,
    pub dropped_exemplars: usize,
}

impl Truncation {
    pub fn applied(&self) -> bool {
        !self.dropped_classes.is_empty() || self.dropped_exemplars > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_id: Option<String>,
    pub owning_class: String,
    pub instruction: String,
    pub methods_section: String,
    pub exemplars: Vec<Exemplar>,
    pub target_tcbd: String,
    pub rendered: String,
    pub token_estimate: usize,
    pub max_tokens: usize,
    pub estimator_id: String,
    pub truncation: Truncation,
    pub no_exemplars: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptOptions {
    pub instruction: String,
    pub budget: PromptBudget,
    pub exemplars: usize,
    /// Block ids never retrieved as exemplars, on top of leakage exclusion.
    pub exclude: BTreeSet<String>,
}

impl Default for PromptOptions {
    fn default() -> Self {
        Self {
            instruction: DEFAULT_INSTRUCTION.to_string(),
            budget: PromptBudget::default(),
            exemplars: 2,
            exclude: BTreeSet::new(),
        }
    }
}

/// One `Class Name:` / `Method Names:` stanza per class, in scope order.
/// Continuation signatures are tab-indented under the first.
pub fn render_methods_section(scope: &[ScopeEntry]) -> String {
    let mut out = String::new();
    for entry in scope {
        out.push_str("Class Name:\t");
        out.push_str(&entry.class_fqn);
        out.push('\n');
        out.push_str("Method Names:");
        for (i, m) in entry.methods.iter().enumerate() {
            out.push_str(if i == 0 { "\t" } else { "\n\t" });
            out.push_str(&m.render());
        }
        out.push('\n');
    }
    out
}

/// Full prompt text, without the `<s>` sequence marker.
pub fn render_prompt(instruction: &str, methods_section: &str, exemplars: &[Exemplar], target_tcbd: &str) -> String {
    let mut out = format!("[INST] {instruction}\n<methods>\n{methods_section}</methods>\n");
    for (i, ex) in exemplars.iter().enumerate() {
        let n = i + 2;
        out.push_str(&format!(
            "<test_description_{n}>\n\"{}\"\n</test_description_{n}>\n<code_block_{n}>\n{}\n</code_block_{n}>\n",
            ex.tcbd,
            ex.body.trim_end()
        ));
    }
    out.push_str(&format!(
        "{TASK_LINE}\n<test_description_1>\n\"{target_tcbd}\"\n</test_description_1>\n[/INST]"
    ));
    out
}

pub fn build_prompt(
    target: &PromptTarget,
    graph: &CodeGraph,
    index: &VectorIndex,
    opts: &PromptOptions,
) -> Result<PromptBundle, PromptError> {
    if opts.budget.max_tokens == 0 {
        return Err(PromptError::ZeroBudget);
    }
    let estimator = opts.budget.estimator()?;
    let (block_id, tcbd, scope, owning_class, query, exclude) = match target {
        PromptTarget::Block(id) => {
            let block = graph.block(id).ok_or_else(|| GraphError::UnknownBlock(id.clone()))?;
            let scope = graph.methods_in_scope(id)?;
            let query = match index.entry(id) {
                Some(e) => e.vector.clone(),
                None => index.embed_query(&block.tcbd)?,
            };
            // The block may be absent from the index (e.g. a held-out split),
            // so twins are also matched on the block's own description.
            let mut exclude = leakage_exclusions(index, id);
            exclude.extend(
                index
                    .entries
                    .iter()
                    .filter(|e| e.tcbd == block.tcbd)
                    .map(|e| e.block_id.clone()),
            );
            (Some(id.clone()), block.tcbd.clone(), scope, block.owner_class.clone(), query, exclude)
        }
        PromptTarget::NewStep { tcbd, path, class } => {
            let class = match class {
                Some(c) => c.clone(),
                None => graph.primary_class(path)?.to_string(),
            };
            let scope = graph.scope_for(path, &class)?;
            let query = if index.is_empty() {
                crate::embedding::EmbeddingVector { values: Vec::new() }
            } else {
                index.embed_query(tcbd)?
            };
            (None, tcbd.clone(), scope, class, query, BTreeSet::new())
        }
    };

    let mut exclude = exclude;
    exclude.extend(opts.exclude.iter().cloned());
    let mut exemplars = Vec::new();
    for (id, score) in top_k(index, &query, opts.exemplars, &exclude)? {
        let Some(b) = graph.block(&id) else {
            log::warn!("index entry {id} has no block in the graph; skipped");
            continue;
        };
        exemplars.push(Exemplar {
            block_id: id,
            tcbd: b.tcbd.clone(),
            body: b.dedented_body(),
            score,
        });
    }

    let fits = |scope: &[ScopeEntry], exemplars: &[Exemplar]| {
        let text = render_prompt(&opts.instruction, &render_methods_section(scope), exemplars, &tcbd);
        estimator.estimate(&text)
    };
    let max = opts.budget.max_tokens;
    let mut truncation = Truncation::default();
    let mut keep = scope.len();
    if fits(&scope, &exemplars) > max {
        // Largest prefix of the scope that fits; the owning class (index 0)
        // is always kept.
        let (mut lo, mut hi) = (1, scope.len());
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if fits(&scope[..mid], &exemplars) <= max {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        keep = lo;
        truncation.dropped_classes = scope[keep..].iter().map(|s| s.class_fqn.clone()).collect();
        while fits(&scope[..keep], &exemplars) > max && !exemplars.is_empty() {
            exemplars.pop();
            truncation.dropped_exemplars += 1;
        }
    }
    let methods_section = render_methods_section(&scope[..keep]);
    let rendered = render_prompt(&opts.instruction, &methods_section, &exemplars, &tcbd);
    let token_estimate = estimator.estimate(&rendered);
    if token_estimate > max {
        return Err(PromptError::OverBudget {
            needed: token_estimate,
            max,
        });
    }
    if truncation.applied() {
        log::info!(
            "prompt for {:?} truncated: dropped {} classes, {} exemplars",
            block_id.as_deref().unwrap_or(&tcbd),
            truncation.dropped_classes.len(),
            truncation.dropped_exemplars
        );
    }
    Ok(PromptBundle {
        block_id,
        owning_class,
        instruction: opts.instruction.clone(),
        methods_section,
        no_exemplars: exemplars.is_empty(),
        exemplars,
        target_tcbd: tcbd,
        rendered,
        token_estimate,
        max_tokens: max,
        estimator_id: estimator.id(),
        truncation,
    })
}

/// Structural tags of a rendered prompt in order of appearance: `[INST]`,
/// `[/INST]` and every line consisting of a single `<tag>` or `</tag>`.
pub fn tag_sequence(rendered: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in rendered.lines() {
        let t = line.trim();
        if t.starts_with("[INST]") || t.starts_with("<s>[INST]") {
            out.push("[INST]".to_string());
        }
        let is_tag = t.len() > 2
            && t.starts_with('<')
            && t.ends_with('>')
            && t[1..t.len() - 1]
                .trim_start_matches('/')
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if is_tag {
            out.push(t.to_string());
        }
        if t.ends_with("[/INST]") {
            out.push("[/INST]".to_string());
        }
    }
    out
}

/// The tag sequence a prompt with `exemplars` exemplars must have.
pub fn expected_tag_sequence(exemplars: usize) -> Vec<String> {
    let mut out = vec!["[INST]".to_string(), "<methods>".into(), "</methods>".into()];
    for n in 2..exemplars + 2 {
        for tag in [
            format!("<test_description_{n}>"),
            format!("</test_description_{n}>"),
            format!("<code_block_{n}>"),
            format!("</code_block_{n}>"),
        ] {
            out.push(tag);
        }
    }
    out.extend(["<test_description_1>".into(), "</test_description_1>".into(), "[/INST]".into()]);
    out
}

/// Check that every tag is closed and tags appear in the canonical order.
/// Tag-like lines inside code blocks are ignored.
pub fn check_tags(rendered: &str, exemplars: usize) -> Result<(), String> {
    let mut seq = tag_sequence(rendered);
    // Drop anything between a code block's open and close tags.
    let mut filtered = Vec::new();
    let mut inside: Option<String> = None;
    for t in seq.drain(..) {
        match &inside {
            Some(close) if &t == close => {
                filtered.push(t);
                inside = None;
            }
            Some(_) => {}
            None => {
                if let Some(n) = t.strip_prefix("<code_block_") {
                    inside = Some(format!("</code_block_{n}"));
                }
                filtered.push(t);
            }
        }
    }
    let expected = expected_tag_sequence(exemplars);
    if filtered != expected {
        return Err(format!("tags {filtered:?}, expected {expected:?}"));
    }
    Ok(())
}
