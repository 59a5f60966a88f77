//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use serde::Deserialize;
use tcgen_core::graph::build_graph_with_diagnostics;
use tcgen_core::{CodeGraph, CorpusConventions, Diagnostic};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_root() -> PathBuf {
    fixtures().join("corpus")
}

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestFile>,
    pub totals: Totals,
}

#[derive(Debug, Deserialize)]
pub struct Totals {
    pub files: usize,
    pub classes: usize,
    pub methods: usize,
    pub blocks: usize,
    pub malformed_blocks: usize,
    pub ignored_blocks: usize,
}

#[derive(Debug, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub package: String,
    pub imports: Vec<String>,
    pub classes: Vec<ManifestClass>,
    pub blocks: Vec<ManifestBlock>,
    pub malformed_blocks: usize,
    pub ignored_blocks: usize,
}

#[derive(Debug, Deserialize)]
pub struct ManifestClass {
    pub fqn: String,
    pub kind: String,
    pub methods: Vec<ManifestMethod>,
}

#[derive(Debug, Deserialize)]
pub struct ManifestMethod {
    pub modifiers: Vec<String>,
    pub signature: String,
}

#[derive(Debug, Deserialize)]
pub struct ManifestBlock {
    pub block_id: String,
    pub ordinal: usize,
    pub tcbd: String,
    pub owner_class: String,
    pub owner_method: String,
    pub start_line: usize,
    pub line_count: usize,
    pub invocations: Vec<String>,
}

pub fn manifest() -> Manifest {
    let text = std::fs::read_to_string(fixtures().join("manifest.json")).expect("manifest present");
    serde_json::from_str(&text).expect("manifest parses")
}

/// Graph over the fixture corpus plus the build diagnostics.
pub fn corpus_graph() -> (CodeGraph, Vec<Diagnostic>) {
    let report = tcgen_core::scan_repository(&corpus_root()).expect("corpus scans");
    assert!(report.skipped.is_empty(), "skipped: {:?}", report.skipped);
    build_graph_with_diagnostics(&report.files, &CorpusConventions::default()).expect("graph builds")
}

fn kind_name(k: tcgen_core::ClassKind) -> &'static str {
    match k {
        tcgen_core::ClassKind::Class => "class",
        tcgen_core::ClassKind::Interface => "interface",
        tcgen_core::ClassKind::Enum => "enum",
    }
}

/// Packages, imports, classes, signatures and modifiers of every fixture
/// file against the manifest. Returns one line per mismatch.
pub fn declaration_mismatches(m: &Manifest) -> Vec<String> {
    let mut out = Vec::new();
    for mf in &m.files {
        let text = match std::fs::read_to_string(corpus_root().join(&mf.path)) {
            Ok(t) => t,
            Err(e) => {
                out.push(format!("{}: {e}", mf.path));
                continue;
            }
        };
        let sf = match tcgen_core::parse_source(&text, &mf.path) {
            Ok(sf) => sf,
            Err(e) => {
                out.push(format!("{}: {e}", mf.path));
                continue;
            }
        };
        let mut check = |what: &str, got: String, want: String| {
            if got != want {
                out.push(format!("{} {what}: got {got}, want {want}", mf.path));
            }
        };
        check("package", sf.package_name.clone(), mf.package.clone());
        let imports: Vec<String> = sf.imports.iter().map(|i| i.to_string()).collect();
        check("imports", format!("{imports:?}"), format!("{:?}", mf.imports));
        let got: Vec<&str> = sf.classes.iter().map(|c| c.fully_qualified_name.as_str()).collect();
        let want: Vec<&str> = mf.classes.iter().map(|c| c.fqn.as_str()).collect();
        check("classes", format!("{got:?}"), format!("{want:?}"));
        for (c, mc) in sf.classes.iter().zip(&mf.classes) {
            check(&format!("{} kind", mc.fqn), kind_name(c.kind).into(), mc.kind.clone());
            let sigs: Vec<String> = c.methods.iter().map(|m| m.render()).collect();
            let want: Vec<&str> = mc.methods.iter().map(|m| m.signature.as_str()).collect();
            check(&format!("{} methods", mc.fqn), format!("{sigs:?}"), format!("{want:?}"));
            for (meth, mm) in c.methods.iter().zip(&mc.methods) {
                check(
                    &format!("{}#{} modifiers", mc.fqn, meth.name),
                    format!("{:?}", meth.modifiers),
                    format!("{:?}", mm.modifiers),
                );
            }
        }
    }
    out
}

/// Block ids, descriptions, owners, positions and invocation sets against
/// the manifest, plus per-file malformed and ignored block counts.
pub fn block_mismatches(m: &Manifest, graph: &CodeGraph, diags: &[Diagnostic]) -> Vec<String> {
    use tcgen_core::DiagnosticKind;
    let mut out = Vec::new();
    let got: std::collections::BTreeSet<&str> = graph.blocks().map(|b| b.block_id.as_str()).collect();
    let want: std::collections::BTreeSet<&str> = m
        .files
        .iter()
        .flat_map(|f| f.blocks.iter().map(|b| b.block_id.as_str()))
        .collect();
    for id in got.symmetric_difference(&want) {
        out.push(format!("block set differs at {id}"));
    }
    for mb in m.files.iter().flat_map(|f| &f.blocks) {
        let Some(b) = graph.block(&mb.block_id) else { continue };
        let mut check = |what: &str, got: String, want: String| {
            if got != want {
                out.push(format!("{} {what}: got {got}, want {want}", mb.block_id));
            }
        };
        check("ordinal", b.ordinal.to_string(), mb.ordinal.to_string());
        check("tcbd", b.tcbd.clone(), mb.tcbd.clone());
        check("owner_class", b.owner_class.clone(), mb.owner_class.clone());
        check("owner_method", b.owner_method.clone(), mb.owner_method.clone());
        check("start_line", b.start_line.to_string(), mb.start_line.to_string());
        check("line_count", b.line_count.to_string(), mb.line_count.to_string());
        let names: Vec<String> = b.invocation_names().into_iter().collect();
        check("invocations", format!("{names:?}"), format!("{:?}", mb.invocations));
    }
    for f in &m.files {
        let count = |k| diags.iter().filter(|d| d.kind == k && d.path == f.path).count();
        if count(DiagnosticKind::MalformedBlock) != f.malformed_blocks {
            out.push(format!("{}: malformed count {}", f.path, count(DiagnosticKind::MalformedBlock)));
        }
        if count(DiagnosticKind::IgnoredBlock) != f.ignored_blocks {
            out.push(format!("{}: ignored count {}", f.path, count(DiagnosticKind::IgnoredBlock)));
        }
    }
    out
}

/// Pipeline configuration over the fixture corpus with every artifact
/// under `out`.
pub fn fixture_config(out: &std::path::Path, llm_url: &str) -> tcgen_core::PipelineConfig {
    let mut cfg = tcgen_core::PipelineConfig {
        repo_roots: vec![corpus_root()],
        graph_path: out.join("graph.json"),
        index_path: out.join("index.json"),
        report_dir: out.join("reports"),
        dataset_dir: out.join("dataset"),
        ..Default::default()
    };
    cfg.llm.base_url = llm_url.to_string();
    cfg
}

/// Names in `body` that appear in declaration position (`Type name(`),
/// found by a plain word scan.
pub fn declared_names(body: &str) -> std::collections::BTreeSet<String> {
    const NOT_TYPES: [&str; 5] = ["return", "new", "throw", "else", "case"];
    let mut words: Vec<(usize, usize)> = Vec::new();
    for (i, c) in body.char_indices() {
        if !(c.is_alphanumeric() || c == '_') {
            continue;
        }
        match words.last_mut() {
            Some((_, end)) if *end == i => *end = i + c.len_utf8(),
            _ => words.push((i, i + c.len_utf8())),
        }
    }
    let mut out = std::collections::BTreeSet::new();
    for pair in words.windows(2) {
        let ((a0, a1), (b0, b1)) = (pair[0], pair[1]);
        let gap = &body[a1..b0];
        let declares = !gap.is_empty()
            && gap.trim().is_empty()
            && body[b1..].trim_start().starts_with('(')
            && !NOT_TYPES.contains(&&body[a0..a1]);
        if declares {
            out.insert(body[b0..b1].to_string());
        }
    }
    out
}
