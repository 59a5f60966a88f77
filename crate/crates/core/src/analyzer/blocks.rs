use crate::lexer::{code_tokens, Token, TokenKind};
use crate::model::{CorpusConventions, SourceFile, TestCodeBlock};

use super::invocations::declares_method;
use super::{extract_invocations, Diagnostic, DiagnosticKind, ExtractOptions};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockExtraction {
    pub blocks: Vec<TestCodeBlock>,
    /// Malformed blocks that were excluded, one diagnostic each.
    pub diagnostics: Vec<Diagnostic>,
}

struct Candidate {
    start: usize,
    end: usize,
    line: usize,
    tcbd: String,
    owner_method: String,
    owner_class: String,
}

/// Find every `begin(...) ... end();` span inside method bodies, in
/// source order.
///
/// A block closes at the next end call at the same brace depth as its
/// begin call. A second begin before that, or leaving the enclosing scope,
/// makes the open block malformed; malformed blocks are excluded and
/// reported.
pub fn extract_test_blocks(file: &SourceFile, conventions: &CorpusConventions) -> BlockExtraction {
    let src = file.raw_text.as_str();
    let toks = code_tokens(src);
    let mut found = Vec::new();
    let mut diagnostics = Vec::new();

    for class in &file.classes {
        for method in &class.methods {
            let Some((body_start, body_end)) = method.body_span else {
                continue;
            };
            let lo = toks.partition_point(|t| t.start < body_start);
            let hi = toks.partition_point(|t| t.start < body_end);
            // skip the body's own braces
            if hi <= lo + 1 {
                continue;
            }
            let body = &toks[lo + 1..hi - 1];
            scan_method(
                src,
                body,
                conventions,
                &file.path,
                |mut c| {
                    c.owner_method = method.key();
                    c.owner_class = class.fully_qualified_name.clone();
                    found.push(c);
                },
                &mut diagnostics,
            );
        }
    }

    // begin calls in constructors, initializers or field lambdas
    let spans: Vec<(usize, usize)> = file
        .classes
        .iter()
        .flat_map(|c| c.methods.iter().filter_map(|m| m.body_span))
        .collect();
    for (i, t) in toks.iter().enumerate() {
        if is_call(src, &toks, i, &conventions.begin)
            && !declares_method(src, &toks, i + 1)
            && !spans.iter().any(|&(a, b)| a <= t.start && t.start < b)
        {
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::IgnoredBlock,
                &file.path,
                Some(t.line),
                format!("{} outside a method body; block ignored", conventions.begin),
            ));
        }
    }

    found.sort_by_key(|c| c.start);
    diagnostics.sort_by_key(|d| d.line);
    let opts = ExtractOptions {
        conventions: conventions.clone(),
        include_constructors: false,
    };
    let blocks = found
        .into_iter()
        .enumerate()
        .map(|(ordinal, c)| {
            let body = src[c.start..c.end].to_string();
            TestCodeBlock {
                block_id: TestCodeBlock::make_id(&file.path, ordinal),
                path: file.path.clone(),
                ordinal,
                tcbd: c.tcbd,
                invocations: extract_invocations(&body, &opts),
                line_count: body.lines().count(),
                body,
                owner_method: c.owner_method,
                owner_class: c.owner_class,
                start_line: c.line,
            }
        })
        .collect();
    BlockExtraction {
        blocks,
        diagnostics,
    }
}

fn is_call(src: &str, toks: &[Token], i: usize, name: &str) -> bool {
    toks[i].is_ident(src, name)
        && toks.get(i + 1).is_some_and(|t| t.is_punct(src, "("))
        && (i == 0 || !toks[i - 1].is_punct(src, "."))
}

fn close_paren(src: &str, toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, t) in toks.iter().enumerate().skip(open) {
        if t.is_punct(src, "(") {
            depth += 1;
        } else if t.is_punct(src, ")") {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

struct Open {
    tok: usize,
    depth: usize,
    tcbd: Option<String>,
}

fn scan_method(
    src: &str,
    toks: &[Token],
    conv: &CorpusConventions,
    path: &str,
    mut emit: impl FnMut(Candidate),
    diags: &mut Vec<Diagnostic>,
) {
    let mut depth = 0usize;
    let mut open: Option<Open> = None;
    let malformed = |o: &Open, why: &str, diags: &mut Vec<Diagnostic>| {
        diags.push(Diagnostic::new(
            DiagnosticKind::MalformedBlock,
            path,
            Some(toks[o.tok].line),
            why.to_string(),
        ));
    };

    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        if t.is_punct(src, "{") {
            depth += 1;
        } else if t.is_punct(src, "}") {
            depth = depth.saturating_sub(1);
            if open.as_ref().is_some_and(|o| depth < o.depth) {
                let o = open.take().unwrap();
                malformed(&o, &format!("scope closed before {}", conv.end), diags);
            }
        } else if is_call(src, toks, i, &conv.begin) {
            if let Some(o) = open.take() {
                malformed(&o, &format!("nested {} before {}", conv.begin, conv.end), diags);
            }
            let tcbd = close_paren(src, toks, i + 1).and_then(|close| {
                toks[i + 2..close]
                    .iter()
                    .find(|a| a.kind == TokenKind::StringLit)
                    .map(|a| {
                        let s = a.text(src);
                        s[1..s.len().saturating_sub(1).max(1)].to_string()
                    })
            });
            open = Some(Open { tok: i, depth, tcbd });
        } else if is_call(src, toks, i, &conv.end) && open.as_ref().is_some_and(|o| o.depth == depth) {
            let o = open.take().unwrap();
            let Some(close) = close_paren(src, toks, i + 1) else {
                malformed(&o, &format!("unterminated {} call", conv.end), diags);
                i += 1;
                continue;
            };
            let last = if toks.get(close + 1).is_some_and(|t| t.is_punct(src, ";")) {
                close + 1
            } else {
                close
            };
            match o.tcbd {
                Some(tcbd) => emit(Candidate {
                    start: toks[o.tok].start,
                    end: toks[last].end,
                    line: toks[o.tok].line,
                    tcbd,
                    owner_method: String::new(),
                    owner_class: String::new(),
                }),
                None => malformed(
                    &o,
                    &format!("{} without a string literal description", conv.begin),
                    diags,
                ),
            }
            i = last + 1;
            continue;
        }
        i += 1;
    }
    if let Some(o) = open {
        malformed(&o, &format!("{} with no following {}", conv.begin, conv.end), diags);
    }
}
