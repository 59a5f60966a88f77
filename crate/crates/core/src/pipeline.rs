//! The pipeline stages behind the command line, each reading and writing
//! artifacts at the configured paths.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::{scan_repository, AnalyzeError, Diagnostic};
use crate::config::{EmbedderConfig, PipelineConfig};
use crate::embedding::{
    build_index, build_index_with, load_index, save_index, EmbedderSpec, EmbeddingError, ExternalEmbedder, VectorIndex,
};
use crate::eval::{
    aggregate, compute_block_f1_with, render_histogram_csv, render_json, render_table, BlockFailure, CorpusReport,
    EvalResult, HistogramBin, MatchingMode, Qualifier, HISTOGRAM_BINS,
};
use crate::analyzer::ResolveContext;
use crate::graph::{build_graph_with_diagnostics, load_graph, save_graph, CodeGraph, EdgeKind, GraphError, NodeKind};
use crate::ift::{export_dataset, export_train_config, ExportSummary, IftError};
use crate::llm::{GenerationResult, GroundTruth, LlmError, LlmGateway};
use crate::model::SourceFile;
use crate::prompt::{build_prompt, PromptBundle, PromptError, PromptOptions, PromptTarget};
use crate::split::Split;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("no repo_roots configured")]
    NoRoots,
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Ift(#[from] IftError),
    #[error("split {0} selects no blocks")]
    EmptySplit(Split),
    #[error("file {0:?} is not in the code graph")]
    UnknownFile(String),
    #[error("file {given:?} matches several graph files: {candidates:?}")]
    AmbiguousFile { given: String, candidates: Vec<String> },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    crate::io::write_atomic(path, text.as_bytes()).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeSummary {
    pub files: usize,
    pub classes: usize,
    pub methods: usize,
    pub blocks: usize,
    pub owns_edges: usize,
    pub invokes_edges: usize,
    pub skipped: Vec<Diagnostic>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Scan every root and parse its sources. With several roots, paths are
/// prefixed with the root's directory name to keep them distinct.
pub fn scan_roots(roots: &[PathBuf]) -> Result<(Vec<SourceFile>, Vec<Diagnostic>), PipelineError> {
    if roots.is_empty() {
        return Err(PipelineError::NoRoots);
    }
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    for root in roots {
        let report = scan_repository(root)?;
        let prefix = (roots.len() > 1).then(|| {
            root.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| root.display().to_string())
        });
        for mut f in report.files {
            if let Some(p) = &prefix {
                f.path = format!("{p}/{}", f.path);
            }
            files.push(f);
        }
        for mut d in report.skipped {
            if let Some(p) = &prefix {
                d.path = format!("{p}/{}", d.path);
            }
            skipped.push(d);
        }
    }
    Ok((files, skipped))
}

pub fn analyze(cfg: &PipelineConfig) -> Result<(CodeGraph, AnalyzeSummary), PipelineError> {
    let (files, skipped) = scan_roots(&cfg.repo_roots)?;
    let (graph, diagnostics) = build_graph_with_diagnostics(&files, &cfg.delimiters)?;
    for d in &diagnostics {
        d.emit();
    }
    if files.is_empty() {
        log::warn!("no Java sources found under {:?}", cfg.repo_roots);
    }
    let summary = AnalyzeSummary {
        files: files.len(),
        classes: graph.count(NodeKind::Class),
        methods: graph.count(NodeKind::Method),
        blocks: graph.count(NodeKind::TestBlock),
        owns_edges: graph.edge_count(EdgeKind::Owns),
        invokes_edges: graph.edge_count(EdgeKind::Invokes),
        skipped,
        diagnostics,
    };
    Ok((graph, summary))
}

pub fn run_analyze(cfg: &PipelineConfig) -> Result<AnalyzeSummary, PipelineError> {
    let (graph, summary) = analyze(cfg)?;
    save_graph(&graph, &cfg.graph_path)?;
    Ok(summary)
}

/// Embed every block description in the graph.
pub fn make_index(graph: &CodeGraph, embedder: &EmbedderConfig) -> Result<VectorIndex, PipelineError> {
    let blocks: Vec<_> = graph.blocks().collect();
    let index = match embedder {
        EmbedderConfig::Lexical => build_index(&blocks)?,
        EmbedderConfig::External(config) => {
            let e = ExternalEmbedder::new(config.clone())?;
            build_index_with(&blocks, &e, Some(&e), EmbedderSpec::External { config: config.clone() })?
        }
    };
    Ok(index)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub entries: usize,
    pub dim: usize,
    pub embedder_id: String,
}

pub fn run_index(cfg: &PipelineConfig) -> Result<IndexSummary, PipelineError> {
    let graph = load_graph(&cfg.graph_path)?;
    let index = make_index(&graph, &cfg.embedder)?;
    save_index(&index, &cfg.index_path)?;
    Ok(IndexSummary {
        entries: index.len(),
        dim: index.dim,
        embedder_id: index.embedder_id.clone(),
    })
}

/// Map a user-supplied file path to the graph's file key: an exact key,
/// a path under a configured root, or a unique key suffix.
pub fn resolve_file_key(graph: &CodeGraph, cfg: &PipelineConfig, given: &str) -> Result<String, PipelineError> {
    let files = graph.files();
    let normalized = given.replace('\\', "/");
    if files.contains_key(&normalized) {
        return Ok(normalized);
    }
    let given_path = Path::new(given);
    for root in &cfg.repo_roots {
        if let Ok(rel) = given_path.strip_prefix(root) {
            let rel = rel.to_string_lossy().replace('\\', "/");
            let prefixed = match (cfg.repo_roots.len() > 1, root.file_name()) {
                (true, Some(n)) => format!("{}/{rel}", n.to_string_lossy()),
                _ => rel,
            };
            if files.contains_key(&prefixed) {
                return Ok(prefixed);
            }
        }
    }
    let tail = normalized.trim_start_matches("./");
    let candidates: Vec<String> = files
        .keys()
        .filter(|k| k.as_str() == tail || k.ends_with(&format!("/{tail}")))
        .cloned()
        .collect();
    match candidates.len() {
        1 => Ok(candidates.into_iter().next().expect("one candidate")),
        0 => Err(PipelineError::UnknownFile(given.to_string())),
        _ => Err(PipelineError::AmbiguousFile {
            given: given.to_string(),
            candidates,
        }),
    }
}

pub fn load_artifacts(cfg: &PipelineConfig) -> Result<(CodeGraph, VectorIndex), PipelineError> {
    let graph = load_graph(&cfg.graph_path)?;
    let index = load_index(&cfg.index_path)?;
    Ok((graph, index))
}

pub fn gateway_for(cfg: &PipelineConfig, graph: &CodeGraph) -> Result<LlmGateway, PipelineError> {
    Ok(LlmGateway::new(
        cfg.llm.clone(),
        GroundTruth::from_graph(graph),
        cfg.extract_options(),
    )?)
}

pub fn run_generate(cfg: &PipelineConfig, target: &PromptTarget) -> Result<(PromptBundle, GenerationResult), PipelineError> {
    let (graph, index) = load_artifacts(cfg)?;
    let target = match target {
        PromptTarget::NewStep { tcbd, path, class } => PromptTarget::NewStep {
            tcbd: tcbd.clone(),
            path: resolve_file_key(&graph, cfg, path)?,
            class: class.clone(),
        },
        other => other.clone(),
    };
    let bundle = build_prompt(&target, &graph, &index, &cfg.prompt_options())?;
    let gateway = gateway_for(cfg, &graph)?;
    let result = gateway.generate(&bundle)?;
    Ok((bundle, result))
}

/// Outcome of evaluating a set of blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRun {
    pub results: Vec<EvalResult>,
    pub generations: Vec<GenerationResult>,
    pub failures: Vec<BlockFailure>,
    /// A fatal endpoint error stopped the run early.
    pub aborted: bool,
}

/// Prompt, generate and score each block in `ids` (in order). A fatal
/// endpoint error (bad credentials or configuration) stops the run; the
/// blocks not attempted are recorded as failures.
pub fn evaluate_blocks(
    graph: &CodeGraph,
    index: &VectorIndex,
    gateway: &LlmGateway,
    ids: &[String],
    opts: &PromptOptions,
    mode: MatchingMode,
) -> EvaluationRun {
    let extract = gateway.extract_options().clone();
    let mut run = EvaluationRun {
        results: Vec::new(),
        generations: Vec::new(),
        failures: Vec::new(),
        aborted: false,
    };
    let chunk_size = gateway.config().max_in_flight.max(1) * 4;
    for chunk in ids.chunks(chunk_size) {
        if run.aborted {
            run.failures.extend(chunk.iter().map(|id| BlockFailure {
                block_id: id.clone(),
                error: "not attempted: run aborted".into(),
            }));
            continue;
        }
        let prompts: Vec<Result<PromptBundle, PromptError>> = chunk
            .par_iter()
            .map(|id| build_prompt(&PromptTarget::Block(id.clone()), graph, index, opts))
            .collect();
        let mut bundles = Vec::new();
        for (id, p) in chunk.iter().zip(prompts) {
            match p {
                Ok(b) => bundles.push(b),
                Err(e) => run.failures.push(BlockFailure {
                    block_id: id.clone(),
                    error: e.to_string(),
                }),
            }
        }
        for (bundle, generated) in bundles.iter().zip(gateway.generate_all(&bundles)) {
            let id = bundle.block_id.clone().expect("block target");
            match generated {
                Ok(g) => {
                    let block = graph.block(&id).expect("prompted block exists");
                    let imports = graph.files().get(&block.path).map(|f| f.imports.as_slice()).unwrap_or(&[]);
                    let qualifier = Qualifier {
                        graph,
                        context: ResolveContext {
                            imports,
                            containing_class: &block.owner_class,
                        },
                    };
                    let mut r = compute_block_f1_with(&block.body, &g.extracted_code, mode, &extract, Some(qualifier));
                    r.block_id = id;
                    run.results.push(r);
                    run.generations.push(g);
                }
                Err(e) => {
                    if e.is_fatal() {
                        run.aborted = true;
                    }
                    log::error!("generation failed for {id}: {e}");
                    run.failures.push(BlockFailure {
                        block_id: id,
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    run.failures.sort_by(|a, b| a.block_id.cmp(&b.block_id));
    run
}

/// Blocks of `split` in id order.
pub fn select_blocks(graph: &CodeGraph, cfg: &PipelineConfig, split: Split) -> Vec<String> {
    let mut ids: Vec<String> = graph
        .blocks()
        .map(|b| b.block_id.clone())
        .filter(|id| cfg.split.contains(split, id))
        .collect();
    ids.sort();
    ids
}

/// Directory-safe form of a model label.
pub fn label_slug(label: &str) -> String {
    let slug: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let slug = slug.trim_matches('-').to_string();
    if slug.is_empty() {
        "model".to_string()
    } else {
        slug
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateOutcome {
    pub report: CorpusReport,
    pub report_dir: PathBuf,
    pub table_path: PathBuf,
    pub json_path: PathBuf,
    pub histogram_path: PathBuf,
    pub generations_path: PathBuf,
}

impl EvaluateOutcome {
    pub fn partial(&self) -> bool {
        self.report.partial
    }
}

fn empty_report(label: &str, mode: MatchingMode) -> CorpusReport {
    CorpusReport {
        model_label: label.to_string(),
        matching_mode: mode,
        blocks_evaluated: 0,
        mean_f1: 0.0,
        sd_f1: 0.0,
        sd_formula: "population".to_string(),
        histogram: (0..HISTOGRAM_BINS)
            .map(|i| HistogramBin {
                bin_low: i as f64 / HISTOGRAM_BINS as f64,
                bin_high: (i + 1) as f64 / HISTOGRAM_BINS as f64,
                count: 0,
            })
            .collect(),
        partial: true,
        failures: Vec::new(),
        per_block: Vec::new(),
    }
}

/// Evaluate `split` and write the table, JSON report, histogram CSV and
/// raw generations under `report_dir/<label>/`. Failed blocks make the
/// report partial; the files are written either way.
pub fn run_evaluate(cfg: &PipelineConfig, split: Split, label: &str) -> Result<EvaluateOutcome, PipelineError> {
    let (graph, index) = load_artifacts(cfg)?;
    let gateway = gateway_for(cfg, &graph)?;
    let ids = select_blocks(&graph, cfg, split);
    if ids.is_empty() {
        return Err(PipelineError::EmptySplit(split));
    }
    let run = evaluate_blocks(&graph, &index, &gateway, &ids, &cfg.prompt_options(), cfg.matching_mode);
    let mut report = match aggregate(run.results, label) {
        Ok(r) => r,
        Err(_) => empty_report(label, cfg.matching_mode),
    };
    report.partial = report.partial || !run.failures.is_empty();
    report.failures = run.failures;

    let dir = cfg.report_dir.join(label_slug(label));
    let outcome = EvaluateOutcome {
        table_path: dir.join("report.md"),
        json_path: dir.join("report.json"),
        histogram_path: dir.join("histogram.csv"),
        generations_path: dir.join("generations.jsonl"),
        report_dir: dir,
        report,
    };
    write(&outcome.table_path, &render_table(&[&outcome.report]))?;
    write(&outcome.json_path, &render_json(&outcome.report))?;
    write(&outcome.histogram_path, &render_histogram_csv(&outcome.report))?;
    let mut gens = String::new();
    for g in &run.generations {
        gens.push_str(&serde_json::to_string(g).expect("generation serializes"));
        gens.push('\n');
    }
    write(&outcome.generations_path, &gens)?;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportOutcome {
    pub summary: ExportSummary,
    pub dataset_path: PathBuf,
    pub config_path: PathBuf,
}

/// Write `dataset_dir/<split>.jsonl` and `dataset_dir/train_config.json`.
pub fn run_export_ift(
    cfg: &PipelineConfig,
    split: Split,
    overrides: &[(String, String)],
) -> Result<ExportOutcome, PipelineError> {
    if split == Split::Test {
        return Err(IftError::TestSplit.into());
    }
    let train_config = export_train_config(&cfg.ift, overrides)?;
    let (graph, index) = load_artifacts(cfg)?;
    let dataset_path = cfg.dataset_dir.join(format!("{split}.jsonl"));
    let config_path = cfg.dataset_dir.join("train_config.json");
    let summary = export_dataset(
        &graph,
        &index,
        &cfg.split,
        split,
        &cfg.prompt_options(),
        train_config.context_length,
        &dataset_path,
    )?;
    write(&config_path, &train_config.to_json())?;
    Ok(ExportOutcome {
        summary,
        dataset_path,
        config_path,
    })
}

/// Per-split block counts, for summaries.
pub fn split_sizes(graph: &CodeGraph, cfg: &PipelineConfig) -> BTreeMap<Split, usize> {
    let mut out = BTreeMap::new();
    for b in graph.blocks() {
        *out.entry(cfg.split.assign(&b.block_id)).or_default() += 1;
    }
    out
}
