//! The code graph: classes, methods and test code blocks as nodes, with
//! ownership and invocation edges.
//!
//! A built graph is immutable. Node keys:
//! - class: fully-qualified name
//! - method: `Owner#name(T1,T2)` (overloads stay distinct)
//! - test block: `path::ordinal`

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyzer::{
    extract_invocations, extract_test_blocks, imported_classes, resolve_invocation, Diagnostic,
    DiagnosticKind, ExtractOptions, Resolution, ResolveContext,
};
use crate::model::{ClassKind, CorpusConventions, ImportDecl, MethodSig, SourceFile, TestCodeBlock};

pub const GRAPH_SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate class {fqn} declared in {first} and {second}")]
    DuplicateClass {
        fqn: String,
        first: String,
        second: String,
    },
    #[error("unknown test block {0}")]
    UnknownBlock(String),
    #[error("unknown file {0}")]
    UnknownFile(String),
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("corrupt graph file {path}: {reason}")]
    Corrupt { path: String, reason: String },
    #[error("graph file {path} has schema version {found}, this build reads {supported}")]
    Version {
        path: String,
        found: String,
        supported: &'static str,
    },
    #[error("graph io on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Class,
    Method,
    TestBlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub fully_qualified_name: String,
    pub kind: ClassKind,
    pub doc: Option<String>,
    pub path: String,
    /// Method node keys in declaration order.
    pub method_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum NodePayload {
    Class(ClassNode),
    Method(MethodSig),
    TestBlock(TestCodeBlock),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub node_id: String,
    #[serde(flatten)]
    pub payload: NodePayload,
}

impl GraphNode {
    pub fn kind(&self) -> NodeKind {
        match self.payload {
            NodePayload::Class(_) => NodeKind::Class,
            NodePayload::Method(_) => NodeKind::Method,
            NodePayload::TestBlock(_) => NodeKind::TestBlock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Owns,
    Invokes,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileSummary {
    pub package_name: String,
    pub imports: Vec<ImportDecl>,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodeGraph {
    nodes: BTreeMap<String, GraphNode>,
    edges: Vec<GraphEdge>,
    files: BTreeMap<String, FileSummary>,
}

/// One stanza of the methods-in-scope listing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeEntry {
    pub class_fqn: String,
    pub methods: Vec<MethodSig>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDocument {
    schema_version: String,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    files: BTreeMap<String, FileSummary>,
}

/// Build the graph from parsed files. Diagnostics (malformed blocks,
/// ambiguous calls, ignored blocks) are emitted to the log; use
/// [`build_graph_with_diagnostics`] to collect them.
pub fn build_graph(files: &[SourceFile], conventions: &CorpusConventions) -> Result<CodeGraph, GraphError> {
    let (g, diags) = build_graph_with_diagnostics(files, conventions)?;
    for d in &diags {
        d.emit();
    }
    Ok(g)
}

pub fn build_graph_with_diagnostics(
    files: &[SourceFile],
    conventions: &CorpusConventions,
) -> Result<(CodeGraph, Vec<Diagnostic>), GraphError> {
    let mut files: Vec<&SourceFile> = files.iter().collect();
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let mut g = CodeGraph::default();
    let mut diags = Vec::new();
    let mut edges = BTreeSet::new();

    for f in &files {
        for c in &f.classes {
            let fqn = &c.fully_qualified_name;
            if let Some(NodePayload::Class(prev)) = g.nodes.get(fqn).map(|n| &n.payload) {
                return Err(GraphError::DuplicateClass {
                    fqn: fqn.clone(),
                    first: prev.path.clone(),
                    second: f.path.clone(),
                });
            }
            let mut method_ids = Vec::new();
            for m in &c.methods {
                let key = m.key();
                if g.nodes.contains_key(&key) {
                    diags.push(Diagnostic::new(
                        DiagnosticKind::DuplicateMethod,
                        &f.path,
                        None,
                        format!("duplicate method {key}; first declaration kept"),
                    ));
                    continue;
                }
                g.insert(&key, NodePayload::Method(m.clone()));
                edges.insert(GraphEdge {
                    from: fqn.clone(),
                    to: key.clone(),
                    kind: EdgeKind::Owns,
                });
                method_ids.push(key);
            }
            g.insert(
                fqn,
                NodePayload::Class(ClassNode {
                    fully_qualified_name: fqn.clone(),
                    kind: c.kind,
                    doc: c.doc.clone(),
                    path: f.path.clone(),
                    method_ids,
                }),
            );
        }
        g.files.insert(
            f.path.clone(),
            FileSummary {
                package_name: f.package_name.clone(),
                imports: f.imports.clone(),
                classes: f.classes.iter().map(|c| c.fully_qualified_name.clone()).collect(),
            },
        );
    }

    let opts = ExtractOptions {
        conventions: conventions.clone(),
        include_constructors: false,
    };

    for f in &files {
        let extraction = extract_test_blocks(f, conventions);
        diags.extend(extraction.diagnostics);
        for mut block in extraction.blocks {
            let ctx = ResolveContext {
                imports: &f.imports,
                containing_class: &block.owner_class,
            };
            let (resolved, ambiguities) = resolve_all(&block.invocations, ctx, &g);
            for (inv, candidates) in ambiguities {
                diags.push(ambiguity(&f.path, Some(block.start_line), &inv, &candidates));
            }
            block.invocations = resolved;
            edges.insert(GraphEdge {
                from: block.owner_method.clone(),
                to: block.block_id.clone(),
                kind: EdgeKind::Owns,
            });
            for target in g.invocation_targets(&block.invocations) {
                edges.insert(GraphEdge {
                    from: block.block_id.clone(),
                    to: target,
                    kind: EdgeKind::Invokes,
                });
            }
            let id = block.block_id.clone();
            g.insert(&id, NodePayload::TestBlock(block));
        }

        for c in &f.classes {
            for m in &c.methods {
                let Some((s, e)) = m.body_span else { continue };
                let key = m.key();
                let invocations = extract_invocations(&f.raw_text[s..e], &opts);
                let ctx = ResolveContext {
                    imports: &f.imports,
                    containing_class: &c.fully_qualified_name,
                };
                let (resolved, _) = resolve_all(&invocations, ctx, &g);
                for target in g.invocation_targets(&resolved) {
                    if target != key {
                        edges.insert(GraphEdge {
                            from: key.clone(),
                            to: target,
                            kind: EdgeKind::Invokes,
                        });
                    }
                }
            }
        }
    }

    g.edges = edges.into_iter().collect();
    Ok((g, diags))
}

fn resolve_all(
    invocations: &BTreeSet<crate::model::InvocationRef>,
    ctx: ResolveContext<'_>,
    g: &CodeGraph,
) -> (
    BTreeSet<crate::model::InvocationRef>,
    Vec<(crate::model::InvocationRef, Vec<String>)>,
) {
    let mut out = BTreeSet::new();
    let mut amb = Vec::new();
    for inv in invocations {
        match resolve_invocation(inv, ctx, g) {
            Resolution::Ambiguous {
                invocation,
                candidates,
            } => {
                amb.push((invocation.clone(), candidates));
                out.insert(invocation);
            }
            r => {
                out.insert(r.into_invocation());
            }
        }
    }
    (out, amb)
}

fn ambiguity(path: &str, line: Option<usize>, inv: &crate::model::InvocationRef, candidates: &[String]) -> Diagnostic {
    Diagnostic::new(
        DiagnosticKind::AmbiguousInvocation,
        path,
        line,
        format!("{} matches {}", inv.simple_name, candidates.join(", ")),
    )
}

impl CodeGraph {
    fn insert(&mut self, id: &str, payload: NodePayload) {
        self.nodes.insert(
            id.to_string(),
            GraphNode {
                node_id: id.to_string(),
                payload,
            },
        );
    }

    /// Method node keys named by resolved invocations; every overload of a
    /// resolved `Class#name` is a target.
    fn invocation_targets(&self, invs: &BTreeSet<crate::model::InvocationRef>) -> Vec<String> {
        let mut out = Vec::new();
        for inv in invs {
            let Some(fqn) = &inv.resolved_fqn else { continue };
            let Some((class, name)) = fqn.split_once('#') else { continue };
            for m in self.class_methods(class) {
                if m.name == name {
                    out.push(m.key());
                }
            }
        }
        out
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn files(&self) -> &BTreeMap<String, FileSummary> {
        &self.files
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.values().filter(|n| n.kind() == kind).count()
    }

    pub fn edge_count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn class(&self, fqn: &str) -> Option<&ClassNode> {
        match self.nodes.get(fqn).map(|n| &n.payload) {
            Some(NodePayload::Class(c)) => Some(c),
            _ => None,
        }
    }

    pub fn method(&self, key: &str) -> Option<&MethodSig> {
        match self.nodes.get(key).map(|n| &n.payload) {
            Some(NodePayload::Method(m)) => Some(m),
            _ => None,
        }
    }

    pub fn block(&self, id: &str) -> Option<&TestCodeBlock> {
        match self.nodes.get(id).map(|n| &n.payload) {
            Some(NodePayload::TestBlock(b)) => Some(b),
            _ => None,
        }
    }

    /// All test blocks ordered by block id.
    pub fn blocks(&self) -> impl Iterator<Item = &TestCodeBlock> {
        self.nodes.values().filter_map(|n| match &n.payload {
            NodePayload::TestBlock(b) => Some(b),
            _ => None,
        })
    }

    /// Methods of a class in declaration order; empty for unknown classes.
    pub fn class_methods(&self, fqn: &str) -> Vec<&MethodSig> {
        self.class(fqn)
            .map(|c| c.method_ids.iter().filter_map(|k| self.method(k)).collect())
            .unwrap_or_default()
    }

    /// Classes whose name is `prefix.<Simple>`, sorted.
    pub fn classes_under(&self, prefix: &str) -> Vec<&str> {
        let lead = format!("{prefix}.");
        self.nodes
            .range(lead.clone()..)
            .take_while(|(k, _)| k.starts_with(&lead))
            .filter(|(k, n)| n.kind() == NodeKind::Class && !k[lead.len()..].contains('.') && !k.contains('#'))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// The `<methods>` scope of a test block: its containing class with all
    /// methods, then every graph-known imported class with public methods
    /// only, in import order. Imported classes without public methods are
    /// left out.
    pub fn methods_in_scope(&self, block_id: &str) -> Result<Vec<ScopeEntry>, GraphError> {
        let block = self
            .block(block_id)
            .ok_or_else(|| GraphError::UnknownBlock(block_id.to_string()))?;
        self.scope_for(&block.path, &block.owner_class)
    }

    /// Scope for code placed in `class_fqn` of file `path`.
    pub fn scope_for(&self, path: &str, class_fqn: &str) -> Result<Vec<ScopeEntry>, GraphError> {
        let file = self
            .files
            .get(path)
            .ok_or_else(|| GraphError::UnknownFile(path.to_string()))?;
        if self.class(class_fqn).is_none() {
            return Err(GraphError::UnknownClass(class_fqn.to_string()));
        }
        let mut out = vec![ScopeEntry {
            class_fqn: class_fqn.to_string(),
            methods: self.class_methods(class_fqn).into_iter().cloned().collect(),
        }];
        for c in imported_classes(&file.imports, self) {
            if c == class_fqn {
                continue;
            }
            let methods: Vec<MethodSig> = self
                .class_methods(&c)
                .into_iter()
                .filter(|m| m.is_public())
                .cloned()
                .collect();
            if !methods.is_empty() {
                out.push(ScopeEntry { class_fqn: c, methods });
            }
        }
        Ok(out)
    }

    /// The first top-level class of a file, used as the owning class for
    /// new test steps.
    pub fn primary_class(&self, path: &str) -> Result<&str, GraphError> {
        let file = self
            .files
            .get(path)
            .ok_or_else(|| GraphError::UnknownFile(path.to_string()))?;
        file.classes
            .first()
            .map(String::as_str)
            .ok_or_else(|| GraphError::UnknownClass(format!("no class in {path}")))
    }

    /// Structural checks: every edge endpoint exists, edge kinds connect
    /// the right node kinds, no self-loops, every block has exactly one
    /// owner.
    pub fn validate(&self) -> Result<(), String> {
        let mut block_owners: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &self.edges {
            let (Some(a), Some(b)) = (self.nodes.get(&e.from), self.nodes.get(&e.to)) else {
                return Err(format!("dangling edge {} -> {}", e.from, e.to));
            };
            if e.from == e.to {
                return Err(format!("self-loop on {}", e.from));
            }
            let ok = match e.kind {
                EdgeKind::Owns => matches!(
                    (a.kind(), b.kind()),
                    (NodeKind::Class, NodeKind::Method) | (NodeKind::Method, NodeKind::TestBlock)
                ),
                EdgeKind::Invokes => {
                    matches!(a.kind(), NodeKind::TestBlock | NodeKind::Method) && b.kind() == NodeKind::Method
                }
            };
            if !ok {
                return Err(format!("edge {:?} {} -> {} has wrong endpoint kinds", e.kind, e.from, e.to));
            }
            if e.kind == EdgeKind::Owns && b.kind() == NodeKind::TestBlock {
                *block_owners.entry(&e.to).or_default() += 1;
            }
        }
        for b in self.blocks() {
            if block_owners.get(b.block_id.as_str()) != Some(&1) {
                return Err(format!("block {} lacks exactly one owner", b.block_id));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDocument {
            schema_version: GRAPH_SCHEMA_VERSION.to_string(),
            nodes: self.nodes.values().cloned().collect(),
            edges: self.edges.clone(),
            files: self.files.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self, GraphError> {
        let corrupt = |reason: String| GraphError::Corrupt {
            path: path.to_string(),
            reason,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
        let version = value
            .get("schema_version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| corrupt("missing schema_version".into()))?;
        check_major(version, GRAPH_SCHEMA_VERSION).map_err(|found| GraphError::Version {
            path: path.to_string(),
            found,
            supported: GRAPH_SCHEMA_VERSION,
        })?;
        let doc: GraphDocument = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
        let mut g = CodeGraph {
            nodes: BTreeMap::new(),
            edges: doc.edges,
            files: doc.files,
        };
        for n in doc.nodes {
            if g.nodes.insert(n.node_id.clone(), n).is_some() {
                return Err(corrupt("duplicate node id".into()));
            }
        }
        g.validate().map_err(corrupt)?;
        Ok(g)
    }
}

/// Accept same-or-older major versions.
pub(crate) fn check_major(found: &str, supported: &str) -> Result<(), String> {
    let major = |v: &str| v.split('.').next().and_then(|m| m.parse::<u32>().ok());
    match (major(found), major(supported)) {
        (Some(f), Some(s)) if f <= s => Ok(()),
        _ => Err(found.to_string()),
    }
}

pub fn save_graph(graph: &CodeGraph, path: &Path) -> Result<(), GraphError> {
    crate::io::write_atomic(path, graph.to_json().as_bytes()).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_graph(path: &Path) -> Result<CodeGraph, GraphError> {
    let text = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    CodeGraph::from_json(&text, &path.display().to_string())
}
