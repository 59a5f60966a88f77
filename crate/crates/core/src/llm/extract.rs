use crate::lexer::code_tokens;
use crate::model::CorpusConventions;

/// Isolate the code in a model reply: the first fenced block's interior,
/// else the span from the begin delimiter through the end delimiter's
/// statement, else the trimmed text.
pub fn extract_code(raw: &str) -> String {
    extract_code_with(raw, &CorpusConventions::default())
}

pub fn extract_code_with(raw: &str, conventions: &CorpusConventions) -> String {
    if let Some(code) = first_fence(raw) {
        return code;
    }
    if let Some(span) = delimited_span(raw, conventions) {
        return span.to_string();
    }
    raw.trim().to_string()
}

fn first_fence(raw: &str) -> Option<String> {
    let open = raw.find("```")?;
    // The rest of the opening line is the language tag.
    let after_tag = open + 3 + raw[open + 3..].find('\n')? + 1;
    let body = &raw[after_tag..];
    let end = body.find("```").unwrap_or(body.len());
    let inner = &body[..end];
    Some(inner.strip_suffix('\n').unwrap_or(inner).to_string())
}

/// Delimiter calls inside strings, text blocks and comments do not count.
/// Lexing starts at the begin call so quotes in leading prose are harmless.
fn delimited_span<'a>(raw: &'a str, conventions: &CorpusConventions) -> Option<&'a str> {
    let start = raw.find(&format!("{}(", conventions.begin))?;
    let code = &raw[start..];
    let toks = code_tokens(code);
    let is_end = |i: usize| {
        toks[i].is_ident(code, &conventions.end) && toks.get(i + 1).is_some_and(|t| t.is_punct(code, "("))
    };
    let end_at = (1..toks.len()).find(|&i| is_end(i))?;
    let mut depth = 0usize;
    let mut close = None;
    for (j, t) in toks.iter().enumerate().skip(end_at + 1) {
        if t.is_punct(code, "(") {
            depth += 1;
        } else if t.is_punct(code, ")") {
            depth -= 1;
            if depth == 0 {
                close = Some(j);
                break;
            }
        }
    }
    let Some(close) = close else {
        return Some(&code[..toks[end_at + 1].end]);
    };
    let last = match toks.get(close + 1) {
        Some(t) if t.is_punct(code, ";") => t,
        _ => &toks[close],
    };
    Some(&code[..last.end])
}
