//! Test code generation for repositories that frame component test steps
//! with `TestBegin("...")` / `TestEnd()` calls.
//!
//! The pipeline runs in stages, each producing an artifact on disk:
//! static analysis into a [`graph::CodeGraph`], an embedding index over test
//! block descriptions, prompt construction with retrieved exemplars, generation
//! through an LLM endpoint, method-invocation F1 evaluation, and export of an
//! instruction fine-tuning dataset.

pub mod analyzer;
pub mod config;
pub mod embedding;
pub mod eval;
pub mod graph;
pub mod http;
pub mod ift;
pub mod io;
pub mod lexer;
pub mod llm;
pub mod model;
pub mod pipeline;
pub mod prompt;
pub mod split;

pub use analyzer::{
    extract_invocations, extract_test_blocks, parse_source, scan_repository, Diagnostic, DiagnosticKind,
    ExtractOptions,
};
pub use graph::{build_graph, load_graph, save_graph, CodeGraph, GraphError};
pub use model::{
    ClassDecl, ClassKind, CorpusConventions, ImportDecl, InvocationRef, MethodSig, Param, SourceFile,
    TestCodeBlock,
};
pub use config::{EmbedderConfig, PipelineConfig};
pub use embedding::{top_k, EmbeddingVector, VectorIndex};
pub use eval::{aggregate, compute_block_f1, CorpusReport, EvalResult, MatchingMode};
pub use ift::{IftRecord, IftTrainConfig};
pub use llm::{extract_code, GenerationResult, LlmEndpointConfig, LlmGateway};
pub use prompt::{build_prompt, estimate_tokens, PromptBudget, PromptBundle, PromptTarget};
pub use split::{Split, SplitSelector};
