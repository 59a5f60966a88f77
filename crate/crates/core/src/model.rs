//! Structural facts extracted from Java sources.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Names of the two framing calls that delimit a test code block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConventions {
    pub begin: String,
    pub end: String,
}

impl Default for CorpusConventions {
    fn default() -> Self {
        Self {
            begin: "TestBegin".to_string(),
            end: "TestEnd".to_string(),
        }
    }
}

impl CorpusConventions {
    pub fn is_delimiter(&self, name: &str) -> bool {
        name == self.begin || name == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    /// Repository-relative path with `/` separators.
    pub path: String,
    pub package_name: String,
    pub imports: Vec<ImportDecl>,
    /// Every type declaration in the file, nested ones included, in source order.
    pub classes: Vec<ClassDecl>,
    pub raw_text: String,
}

impl SourceFile {
    pub fn class(&self, fqn: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.fully_qualified_name == fqn)
    }

    pub fn method_count(&self) -> usize {
        self.classes.iter().map(|c| c.methods.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportDecl {
    /// Dotted path without any trailing `.*`.
    pub qualified_name: String,
    pub is_static: bool,
    pub is_wildcard: bool,
}

impl ImportDecl {
    pub fn simple_name(&self) -> &str {
        self.qualified_name
            .rsplit('.')
            .next()
            .unwrap_or(&self.qualified_name)
    }
}

impl fmt::Display for ImportDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "import ")?;
        if self.is_static {
            write!(f, "static ")?;
        }
        write!(f, "{}", self.qualified_name)?;
        if self.is_wildcard {
            write!(f, ".*")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub fully_qualified_name: String,
    pub kind: ClassKind,
    pub methods: Vec<MethodSig>,
    pub doc: Option<String>,
}

impl ClassDecl {
    pub fn simple_name(&self) -> &str {
        simple_class_name(&self.fully_qualified_name)
    }
}

pub fn simple_class_name(fqn: &str) -> &str {
    fqn.rsplit('.').next().unwrap_or(fqn)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    #[serde(rename = "type")]
    pub ty: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSig {
    pub name: String,
    /// Return type as written, whitespace-normalized; generic method type
    /// parameters are kept as a prefix (`<T> List<T>`).
    pub return_type: String,
    pub params: Vec<Param>,
    /// Modifiers in source order. Interface members that are implicitly
    /// public carry an explicit `public`.
    pub modifiers: Vec<String>,
    pub owner: String,
    pub doc: Option<String>,
    /// Byte span of the body including braces, when the method has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_span: Option<(usize, usize)>,
}

impl MethodSig {
    pub fn has_modifier(&self, m: &str) -> bool {
        self.modifiers.iter().any(|x| x == m)
    }

    pub fn is_public(&self) -> bool {
        self.has_modifier("public")
    }

    pub fn is_static(&self) -> bool {
        self.has_modifier("static")
    }

    /// `[static] ReturnType name(ParamType p, ...)`
    pub fn render(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|p| format!("{} {}", p.ty, p.name))
            .collect::<Vec<_>>()
            .join(", ");
        let prefix = if self.is_static() { "static " } else { "" };
        format!("{prefix}{} {}({params})", self.return_type, self.name)
    }

    /// Graph key: `Owner#name(T1,T2)`.
    pub fn key(&self) -> String {
        let types = self
            .params
            .iter()
            .map(|p| p.ty.as_str())
            .collect::<Vec<_>>()
            .join(",");
        format!("{}#{}({types})", self.owner, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InvocationRef {
    pub simple_name: String,
    /// Receiver expression as written, whitespace-collapsed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<String>,
    /// `pkg.Class#method` once resolved against the code graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_fqn: Option<String>,
}

impl InvocationRef {
    pub fn new(simple_name: impl Into<String>) -> Self {
        Self {
            simple_name: simple_name.into(),
            receiver: None,
            resolved_fqn: None,
        }
    }

    pub fn with_receiver(mut self, receiver: impl Into<String>) -> Self {
        self.receiver = Some(receiver.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCodeBlock {
    /// `path::ordinal`
    pub block_id: String,
    pub path: String,
    pub ordinal: usize,
    pub tcbd: String,
    pub body: String,
    /// Graph key of the containing method.
    pub owner_method: String,
    pub owner_class: String,
    pub invocations: BTreeSet<InvocationRef>,
    pub line_count: usize,
    /// 1-based line of the opening call.
    pub start_line: usize,
}

impl TestCodeBlock {
    pub fn make_id(path: &str, ordinal: usize) -> String {
        format!("{path}::{ordinal}")
    }

    /// The body with the indentation shared by its continuation lines
    /// removed, as if the begin call started at column 0.
    pub fn dedented_body(&self) -> String {
        dedent_continuation(&self.body)
    }

    pub fn invocation_names(&self) -> BTreeSet<String> {
        self.invocations
            .iter()
            .map(|i| i.simple_name.clone())
            .collect()
    }
}

/// Strip from every line after the first the smallest indentation found
/// among those lines; blank lines become empty.
pub fn dedent_continuation(text: &str) -> String {
    let mut lines = text.lines();
    let Some(first) = lines.next() else {
        return String::new();
    };
    let rest: Vec<&str> = lines.collect();
    let indent = |l: &str| l.len() - l.trim_start_matches([' ', '\t']).len();
    let common = rest
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| indent(l))
        .min()
        .unwrap_or(0);
    let mut out = first.to_string();
    for l in rest {
        out.push('\n');
        if !l.trim().is_empty() {
            out.push_str(&l[common..]);
        }
    }
    out
}
