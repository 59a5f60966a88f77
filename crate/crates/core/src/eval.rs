//! Method-invocation F1 between generated and ground-truth code, corpus
//! aggregates and report rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analyzer::{extract_invocations, resolve_invocation, ExtractOptions, ResolveContext};
use crate::graph::CodeGraph;

pub const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no results to aggregate")]
    Empty,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMode {
    /// Compare bare method names.
    #[default]
    SimpleName,
    /// Compare `pkg.Class#name` after resolution; unresolved calls become
    /// `?#name`.
    Qualified,
}

/// Resolution context for qualified matching.
#[derive(Clone, Copy)]
pub struct Qualifier<'a> {
    pub graph: &'a CodeGraph,
    pub context: ResolveContext<'a>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub block_id: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gt_methods: BTreeSet<String>,
    pub gen_methods: BTreeSet<String>,
    pub matching_mode: MatchingMode,
}

impl EvalResult {
    /// Histogram bin of this block's F1, computed from the counts so that
    /// boundary values land exactly: `f1 = 2tp / (2tp + fp + fn)`.
    pub fn bin(&self) -> usize {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            return HISTOGRAM_BINS - 1;
        }
        (HISTOGRAM_BINS * 2 * self.tp / denom).min(HISTOGRAM_BINS - 1)
    }
}

/// Keys compared under `mode` for the calls in `text`.
pub fn method_keys(
    text: &str,
    mode: MatchingMode,
    extract: &ExtractOptions,
    qualifier: Option<Qualifier<'_>>,
) -> BTreeSet<String> {
    let calls = extract_invocations(text, extract);
    match mode {
        MatchingMode::SimpleName => calls.into_iter().map(|c| c.simple_name).collect(),
        MatchingMode::Qualified => calls
            .into_iter()
            .map(|c| {
                let resolved = qualifier.and_then(|q| resolve_invocation(&c, q.context, q.graph).into_invocation().resolved_fqn);
                resolved.unwrap_or_else(|| format!("?#{}", c.simple_name))
            })
            .collect(),
    }
}

/// Score two key sets. Empty-set conventions: both empty is perfect
/// agreement (1.0); otherwise an empty side has precision or recall 0.
pub fn score_sets(block_id: &str, gt: BTreeSet<String>, gen: BTreeSet<String>, mode: MatchingMode) -> EvalResult {
    let tp = gt.intersection(&gen).count();
    let fp = gen.len() - tp;
    let fn_ = gt.len() - tp;
    let ratio = |num: usize, den: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else if gt.is_empty() && gen.is_empty() {
            1.0
        } else {
            0.0
        }
    };
    let precision = ratio(tp, gen.len());
    let recall = ratio(tp, gt.len());
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    EvalResult {
        block_id: block_id.to_string(),
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1,
        gt_methods: gt,
        gen_methods: gen,
        matching_mode: mode,
    }
}

/// F1 of the calls in `gen_body` against those in `gt_body`, with the
/// block delimiters excluded.
pub fn compute_block_f1(gt_body: &str, gen_body: &str, mode: MatchingMode) -> EvalResult {
    compute_block_f1_with(gt_body, gen_body, mode, &ExtractOptions::default(), None)
}

pub fn compute_block_f1_with(
    gt_body: &str,
    gen_body: &str,
    mode: MatchingMode,
    extract: &ExtractOptions,
    qualifier: Option<Qualifier<'_>>,
) -> EvalResult {
    let gt = method_keys(gt_body, mode, extract, qualifier);
    let gen = method_keys(gen_body, mode, extract, qualifier);
    score_sets("", gt, gen, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFailure {
    pub block_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub model_label: String,
    pub matching_mode: MatchingMode,
    pub blocks_evaluated: usize,
    pub mean_f1: f64,
    pub sd_f1: f64,
    pub sd_formula: String,
    pub histogram: Vec<HistogramBin>,
    /// Set when some selected blocks could not be evaluated; those are
    /// listed in `failures` and excluded from the statistics.
    pub partial: bool,
    pub failures: Vec<BlockFailure>,
    pub per_block: Vec<EvalResult>,
}

/// Mean, population SD and a 10-bin histogram over per-block F1.
pub fn aggregate(results: Vec<EvalResult>, model_label: &str) -> Result<CorpusReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = results.len() as f64;
    let mean = results.iter().map(|r| r.f1).sum::<f64>() / n;
    let var = results.iter().map(|r| (r.f1 - mean).powi(2)).sum::<f64>() / n;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for r in &results {
        counts[r.bin()] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| HistogramBin {
            bin_low: i as f64 / HISTOGRAM_BINS as f64,
            bin_high: (i + 1) as f64 / HISTOGRAM_BINS as f64,
            count,
        })
        .collect();
    Ok(CorpusReport {
        model_label: model_label.to_string(),
        matching_mode: results[0].matching_mode,
        blocks_evaluated: results.len(),
        mean_f1: mean,
        sd_f1: var.sqrt(),
        sd_formula: "population".to_string(),
        histogram,
        partial: false,
        failures: Vec::new(),
        per_block: results,
    })
}

/// Markdown table with one row per report.
pub fn render_table(reports: &[&CorpusReport]) -> String {
    let mut out = String::from("| Approach | F1 (Mean) | F1 (SD) |\n|---|---|---|\n");
    for r in reports {
        let _ = writeln!(out, "| {} | {:.4} | {:.4} |", r.model_label, r.mean_f1, r.sd_f1);
    }
    let total: usize = reports.iter().map(|r| r.blocks_evaluated).sum();
    let _ = writeln!(
        out,
        "\nBlocks evaluated: {total}. SD is the population standard deviation."
    );
    if reports.iter().any(|r| r.partial) {
        out.push_str("PARTIAL: some blocks failed and are excluded; see the JSON report.\n");
    }
    out
}

pub fn render_histogram_csv(report: &CorpusReport) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for b in &report.histogram {
        let _ = writeln!(out, "{:.1},{:.1},{}", b.bin_low, b.bin_high, b.count);
    }
    out
}

pub fn render_json(report: &CorpusReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
