//! Static analysis of Java sources: declarations, test code blocks and
//! call sites.

mod blocks;
mod invocations;
mod parse;
mod resolve;
mod scan;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use blocks::{extract_test_blocks, BlockExtraction};
pub use invocations::{extract_invocations, invocation_names, ExtractOptions};
pub use parse::parse_source;
pub(crate) use parse::join_tokens;
pub use resolve::{imported_classes, resolve_invocation, Resolution, ResolveContext};
pub use scan::{scan_repository, ScanReport};

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: not valid UTF-8")]
    NotUtf8 { path: String },
    #[error("cannot read repository root {path}: {source}")]
    Root {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    SkippedFile,
    MalformedBlock,
    AmbiguousInvocation,
    DuplicateMethod,
    IgnoredBlock,
}

/// One entry on the diagnostic stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, path: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            kind,
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Write to the log as a single structured line.
    pub fn emit(&self) {
        log::warn!("{self}");
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = serde_json::to_value(self.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        write!(f, "diagnostic kind={kind} path={}", self.path)?;
        if let Some(line) = self.line {
            write!(f, " line={line}")?;
        }
        write!(f, " message={:?}", self.message)
    }
}
