use std::collections::BTreeSet;

use crate::lexer::{code_tokens, is_reserved, Token, TokenKind};
use crate::model::{CorpusConventions, InvocationRef};

use super::join_tokens;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractOptions {
    pub conventions: CorpusConventions,
    /// Count `new X(...)` as an invocation of `X`.
    pub include_constructors: bool,
}

/// Collect call sites from Java-like text.
///
/// Total on arbitrary input: the text does not need to compile. Every
/// `identifier(` outside comments and literals counts, except reserved
/// words, annotations, constructor calls, method declarations (e.g. in an
/// anonymous class) and the block delimiters.
pub fn extract_invocations(text: &str, opts: &ExtractOptions) -> BTreeSet<InvocationRef> {
    let toks = code_tokens(text);
    let mut out = BTreeSet::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Ident {
            continue;
        }
        let name = t.text(text);
        if name == "new" {
            if opts.include_constructors {
                if let Some(ctor) = constructed_type(text, &toks, i) {
                    out.insert(InvocationRef::new(ctor));
                }
            }
            continue;
        }
        let Some(next) = toks.get(i + 1) else { continue };
        if !next.is_punct(text, "(") || is_reserved(name) || opts.conventions.is_delimiter(name) {
            continue;
        }
        if i > 0 && toks[i - 1].is_punct(text, "@") {
            continue;
        }
        if follows_new(text, &toks, i) || declares_method(text, &toks, i + 1) {
            continue;
        }
        let mut r = InvocationRef::new(name);
        if let Some(start) = receiver_start(text, &toks, i) {
            r.receiver = Some(join_tokens(text, &toks[start..i - 1]));
        }
        out.insert(r);
    }
    out
}

/// Simple names only, duplicates collapsed.
pub fn invocation_names(text: &str, opts: &ExtractOptions) -> BTreeSet<String> {
    extract_invocations(text, opts)
        .into_iter()
        .map(|r| r.simple_name)
        .collect()
}

/// Whether the identifier at `i` is the (possibly qualified) type of a
/// `new` expression, e.g. `new a.b.C(`.
fn follows_new(src: &str, toks: &[Token], mut i: usize) -> bool {
    while i >= 2 && toks[i - 1].is_punct(src, ".") && toks[i - 2].kind == TokenKind::Ident {
        i -= 2;
    }
    i >= 1 && toks[i - 1].is_ident(src, "new")
}

/// Whether the argument list opening at `open` is followed by a body or a
/// `throws` clause, i.e. belongs to a declaration rather than a call.
pub(super) fn declares_method(src: &str, toks: &[Token], open: usize) -> bool {
    let mut depth = 0usize;
    for (j, t) in toks.iter().enumerate().skip(open) {
        if t.is_punct(src, "(") {
            depth += 1;
        } else if t.is_punct(src, ")") {
            depth -= 1;
            if depth == 0 {
                return toks
                    .get(j + 1)
                    .is_some_and(|n| n.is_punct(src, "{") || n.is_ident(src, "throws"));
            }
        }
    }
    false
}

fn constructed_type(src: &str, toks: &[Token], new_idx: usize) -> Option<String> {
    let mut i = new_idx + 1;
    let mut last = None;
    while let Some(t) = toks.get(i) {
        if t.kind != TokenKind::Ident {
            break;
        }
        last = Some(t.text(src).to_string());
        if toks.get(i + 1).is_some_and(|d| d.is_punct(src, ".")) {
            i += 2;
        } else {
            break;
        }
    }
    last.filter(|n| !is_reserved(n))
}

/// Walk left from a `.name(` call to the start of its receiver chain.
fn receiver_start(src: &str, toks: &[Token], i: usize) -> Option<usize> {
    if i < 2 || !toks[i - 1].is_punct(src, ".") {
        return None;
    }
    let mut dot = i - 1;
    let mut start = None;
    loop {
        if dot == 0 {
            break;
        }
        let mut j = dot - 1;
        let mut group_start = None;
        // trailing argument lists / indexers: `getInstance()` or `a[0]`
        while toks[j].is_punct(src, ")") || toks[j].is_punct(src, "]") {
            let open = matching_open(src, toks, j)?;
            group_start = Some(open);
            if open == 0 {
                break;
            }
            j = open - 1;
        }
        let operand = match toks[j].kind {
            TokenKind::Ident
            | TokenKind::StringLit
            | TokenKind::TextBlock
            | TokenKind::CharLit
            | TokenKind::Number
                if group_start != Some(j) =>
            {
                j
            }
            _ => match group_start {
                Some(g) => g,
                None => break,
            },
        };
        start = Some(operand);
        if operand >= 1 && toks[operand - 1].is_punct(src, ".") {
            dot = operand - 1;
        } else {
            break;
        }
    }
    start
}

fn matching_open(src: &str, toks: &[Token], close: usize) -> Option<usize> {
    let (o, c) = if toks[close].is_punct(src, ")") {
        ("(", ")")
    } else {
        ("[", "]")
    };
    let mut depth = 0usize;
    for j in (0..=close).rev() {
        if toks[j].is_punct(src, c) {
            depth += 1;
        } else if toks[j].is_punct(src, o) {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}
