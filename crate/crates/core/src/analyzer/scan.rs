use std::path::Path;

use rayon::prelude::*;
use walkdir::WalkDir;

use crate::model::SourceFile;

use super::{parse_source, AnalyzeError, Diagnostic, DiagnosticKind};

#[derive(Debug, Default)]
pub struct ScanReport {
    /// Parsed files in lexicographic path order.
    pub files: Vec<SourceFile>,
    /// Files that could not be parsed, with the reason.
    pub skipped: Vec<Diagnostic>,
}

/// Parse every `.java` file under `root`.
///
/// Per-file failures land in the skip-list; only an unreadable root is
/// fatal. Paths are relative to `root` and use `/` separators.
pub fn scan_repository(root: &Path) -> Result<ScanReport, AnalyzeError> {
    let meta = std::fs::metadata(root).map_err(|source| AnalyzeError::Root {
        path: root.display().to_string(),
        source,
    })?;
    if !meta.is_dir() {
        return Err(AnalyzeError::Root {
            path: root.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a directory"),
        });
    }

    let mut paths = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| AnalyzeError::Root {
            path: root.display().to_string(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "java") {
            let rel = entry
                .path()
                .strip_prefix(root)
                .unwrap_or(entry.path())
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            paths.push((rel, entry.into_path()));
        }
    }
    paths.sort();

    let results: Vec<Result<SourceFile, AnalyzeError>> = paths
        .par_iter()
        .map(|(rel, abs)| {
            let bytes = std::fs::read(abs).map_err(|source| AnalyzeError::Io {
                path: rel.clone(),
                source,
            })?;
            let text = String::from_utf8(bytes).map_err(|_| AnalyzeError::NotUtf8 { path: rel.clone() })?;
            parse_source(&text, rel)
        })
        .collect();

    let mut report = ScanReport::default();
    for ((rel, _), res) in paths.iter().zip(results) {
        match res {
            Ok(f) => report.files.push(f),
            Err(e) => {
                let line = match &e {
                    AnalyzeError::Parse { line, .. } => Some(*line),
                    _ => None,
                };
                let d = Diagnostic::new(DiagnosticKind::SkippedFile, rel, line, e.to_string());
                d.emit();
                report.skipped.push(d);
            }
        }
    }
    Ok(report)
}
