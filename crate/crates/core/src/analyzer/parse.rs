use crate::lexer::{tokenize, Token, TokenKind};
use crate::model::{ClassDecl, ClassKind, ImportDecl, MethodSig, Param, SourceFile};

use super::AnalyzeError;

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "default",
    "strictfp",
    "transient",
    "volatile",
    "sealed",
];

/// Parse one Java compilation unit into structural facts.
///
/// Only declarations are modeled: package, imports, type declarations
/// (nested ones included), and method signatures with body spans.
/// Constructors, fields and initializer blocks are recognized and skipped.
pub fn parse_source(text: &str, path: &str) -> Result<SourceFile, AnalyzeError> {
    let all = tokenize(text);
    let mut toks = Vec::with_capacity(all.len());
    let mut docs = Vec::with_capacity(all.len());
    let mut pending_doc: Option<&Token> = None;
    for t in &all {
        match t.kind {
            TokenKind::DocComment => pending_doc = Some(t),
            TokenKind::LineComment | TokenKind::BlockComment => {}
            _ => {
                toks.push(*t);
                docs.push(pending_doc.take().map(|d| clean_doc(d.text(text))));
            }
        }
    }
    check_braces(text, &toks).map_err(|(line, message)| AnalyzeError::Parse {
        path: path.to_string(),
        line,
        message,
    })?;

    let mut p = Parser {
        src: text,
        toks: &toks,
        docs: &docs,
        package: String::new(),
        imports: Vec::new(),
        classes: Vec::new(),
    };
    p.compilation_unit();
    Ok(SourceFile {
        path: path.to_string(),
        package_name: p.package,
        imports: p.imports,
        classes: p.classes,
        raw_text: text.to_string(),
    })
}

fn check_braces(src: &str, toks: &[Token]) -> Result<(), (usize, String)> {
    let mut open: Vec<usize> = Vec::new();
    for t in toks {
        if t.is_punct(src, "{") {
            open.push(t.line);
        } else if t.is_punct(src, "}") && open.pop().is_none() {
            return Err((t.line, "unmatched '}'".to_string()));
        }
    }
    match open.last() {
        Some(&line) => Err((line, "unclosed '{'".to_string())),
        None => Ok(()),
    }
}

fn clean_doc(raw: &str) -> String {
    let inner = raw
        .strip_prefix("/**")
        .unwrap_or(raw)
        .strip_suffix("*/")
        .unwrap_or(raw);
    inner
        .lines()
        .map(|l| {
            let l = l.trim();
            l.strip_prefix('*').map(str::trim_start).unwrap_or(l)
        })
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Join tokens into normalized source text: no whitespace except between
/// adjacent word-like tokens, after commas, and around `&`.
pub(crate) fn join_tokens(src: &str, toks: &[Token]) -> String {
    let mut out = String::new();
    let mut prev: Option<&Token> = None;
    for t in toks {
        if let Some(p) = prev {
            let pt = p.text(src);
            let ct = t.text(src);
            let wordish = |tok: &Token, text: &str| {
                matches!(
                    tok.kind,
                    TokenKind::Ident | TokenKind::Number | TokenKind::StringLit | TokenKind::CharLit
                ) || text == "?"
            };
            let space = (wordish(p, pt) && wordish(t, ct))
                || (matches!(pt, ">" | "]") && t.kind == TokenKind::Ident)
                || pt == ","
                || pt == "&"
                || ct == "&";
            if space {
                out.push(' ');
            }
        }
        out.push_str(t.text(src));
        prev = Some(t);
    }
    out
}

struct Parser<'a> {
    src: &'a str,
    toks: &'a [Token],
    docs: &'a [Option<String>],
    package: String,
    imports: Vec<ImportDecl>,
    classes: Vec<ClassDecl>,
}

impl<'a> Parser<'a> {
    fn text(&self, i: usize) -> &'a str {
        self.toks[i].text(self.src)
    }

    fn is(&self, i: usize, s: &str) -> bool {
        i < self.toks.len() && self.text(i) == s && self.toks[i].kind != TokenKind::StringLit
    }

    fn is_ident(&self, i: usize) -> bool {
        i < self.toks.len() && self.toks[i].kind == TokenKind::Ident
    }

    fn compilation_unit(&mut self) {
        let mut i = 0;
        while i < self.toks.len() {
            if self.is(i, "package") {
                let (name, next) = self.dotted_until_semicolon(i + 1);
                self.package = name;
                i = next;
            } else if self.is(i, "import") {
                i = self.import(i + 1);
            } else if self.is(i, ";") {
                i += 1;
            } else {
                let (_, _, j) = self.modifiers(i);
                if self.type_keyword(j).is_some() {
                    let outer = self.package.clone();
                    i = self.type_decl(i, &outer);
                } else if self.is(j, "{") {
                    i = self.close_of(j) + 1;
                } else {
                    i = j.max(i + 1);
                }
            }
        }
    }

    fn dotted_until_semicolon(&self, mut i: usize) -> (String, usize) {
        let mut name = String::new();
        while i < self.toks.len() && !self.is(i, ";") {
            name.push_str(self.text(i));
            i += 1;
        }
        (name, i + 1)
    }

    fn import(&mut self, i: usize) -> usize {
        let (is_static, start) = if self.is(i, "static") {
            (true, i + 1)
        } else {
            (false, i)
        };
        let (mut name, next) = self.dotted_until_semicolon(start);
        let is_wildcard = name.ends_with(".*");
        if is_wildcard {
            name.truncate(name.len() - 2);
        }
        if !name.is_empty() {
            self.imports.push(ImportDecl {
                qualified_name: name,
                is_static,
                is_wildcard,
            });
        }
        next
    }

    /// Consume annotations and modifiers starting at `i`.
    /// Returns (modifiers, doc attached to the first token, next index).
    fn modifiers(&self, mut i: usize) -> (Vec<String>, Option<String>, usize) {
        let doc = self.docs.get(i).cloned().flatten();
        let mut mods = Vec::new();
        loop {
            if self.is(i, "@") && !self.is(i + 1, "interface") {
                i = self.skip_annotation(i);
            } else if self.is_ident(i) && MODIFIERS.contains(&self.text(i)) {
                mods.push(self.text(i).to_string());
                i += 1;
            } else if self.is(i, "non") && self.is(i + 1, "-") && self.is(i + 2, "sealed") {
                mods.push("non-sealed".to_string());
                i += 3;
            } else {
                return (mods, doc, i);
            }
        }
    }

    fn skip_annotation(&self, mut i: usize) -> usize {
        i += 1;
        while self.is_ident(i) {
            i += 1;
            if self.is(i, ".") && self.is_ident(i + 1) {
                i += 1;
            } else {
                break;
            }
        }
        if self.is(i, "(") {
            i = self.close_of(i) + 1;
        }
        i
    }

    fn type_keyword(&self, i: usize) -> Option<(ClassKind, usize)> {
        if self.is(i, "@") && self.is(i + 1, "interface") {
            return Some((ClassKind::Interface, i + 2));
        }
        if !self.is_ident(i) {
            return None;
        }
        let kind = match self.text(i) {
            "class" | "record" => ClassKind::Class,
            "interface" => ClassKind::Interface,
            "enum" => ClassKind::Enum,
            _ => return None,
        };
        // `record` is contextual; require a following name
        if self.text(i) == "record" && !self.is_ident(i + 1) {
            return None;
        }
        Some((kind, i + 1))
    }

    /// Index of the bracket closing the one at `open`, or the last token
    /// when unbalanced.
    fn close_of(&self, open: usize) -> usize {
        let (o, c) = match self.text(open) {
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            _ => ("{", "}"),
        };
        let mut depth = 0usize;
        for j in open..self.toks.len() {
            if self.is(j, o) {
                depth += 1;
            } else if self.is(j, c) {
                depth -= 1;
                if depth == 0 {
                    return j;
                }
            }
        }
        self.toks.len().saturating_sub(1)
    }

    /// Parse a type declaration whose modifiers start at `i`; returns the
    /// index after its closing brace.
    fn type_decl(&mut self, i: usize, outer: &str) -> usize {
        let (_, doc, j) = self.modifiers(i);
        let Some((kind, name_idx)) = self.type_keyword(j) else {
            return j + 1;
        };
        if !self.is_ident(name_idx) {
            return name_idx;
        }
        let simple = self.text(name_idx).to_string();
        let fqn = if outer.is_empty() {
            simple.clone()
        } else {
            format!("{outer}.{simple}")
        };
        // header: type params, record components, extends/implements
        let mut k = name_idx + 1;
        while k < self.toks.len() && !self.is(k, "{") {
            if self.is(k, "(") {
                k = self.close_of(k);
            }
            if self.is(k, ";") {
                return k + 1;
            }
            k += 1;
        }
        if k >= self.toks.len() {
            return k;
        }
        self.type_body(k, &fqn, kind, doc)
    }

    fn type_body(
        &mut self,
        open: usize,
        fqn: &str,
        kind: ClassKind,
        doc: Option<String>,
    ) -> usize {
        let slot = self.classes.len();
        self.classes.push(ClassDecl {
            fully_qualified_name: fqn.to_string(),
            kind,
            methods: Vec::new(),
            doc,
        });
        let close = self.close_of(open);
        let mut i = open + 1;
        if kind == ClassKind::Enum {
            i = self.skip_enum_constants(i, close);
        }
        while i < close {
            if self.is(i, ";") {
                i += 1;
                continue;
            }
            let (mods, doc, j) = self.modifiers(i);
            if self.type_keyword(j).is_some() {
                i = self.type_decl(i, fqn);
                continue;
            }
            if self.is(j, "{") {
                i = self.close_of(j) + 1;
                continue;
            }
            // member header up to the first structural token outside <>
            let mut k = j;
            let mut angle = 0i32;
            while k < close {
                let t = self.text(k);
                match t {
                    "<" => angle += 1,
                    ">" => angle = (angle - 1).max(0),
                    "(" | "=" | ";" | "{" if angle == 0 => break,
                    _ => {}
                }
                k += 1;
            }
            if k >= close {
                break;
            }
            match self.text(k) {
                "(" => {
                    let (sig, next) = self.method(j, k, close, fqn, kind, mods, doc);
                    if let Some(sig) = sig {
                        self.classes[slot].methods.push(sig);
                    }
                    i = next;
                }
                "{" => i = self.close_of(k) + 1,
                _ => i = self.skip_to_semicolon(k, close),
            }
        }
        close + 1
    }

    fn skip_enum_constants(&self, mut i: usize, close: usize) -> usize {
        while i < close {
            match self.text(i) {
                ";" => return i + 1,
                "(" | "{" => i = self.close_of(i) + 1,
                _ => i += 1,
            }
        }
        close
    }

    /// Skip a field declaration; stops after `;` at depth 0 or at `limit`.
    fn skip_to_semicolon(&self, mut i: usize, limit: usize) -> usize {
        while i < limit {
            match self.text(i) {
                ";" => return i + 1,
                "(" | "{" | "[" => i = self.close_of(i) + 1,
                _ => i += 1,
            }
        }
        limit
    }

    #[allow(clippy::too_many_arguments)]
    fn method(
        &self,
        header_start: usize,
        lparen: usize,
        limit: usize,
        owner: &str,
        kind: ClassKind,
        mut mods: Vec<String>,
        doc: Option<String>,
    ) -> (Option<MethodSig>, usize) {
        let rparen = self.close_of(lparen);
        let mut k = rparen + 1;
        while k < limit && !self.is(k, "{") && !self.is(k, ";") {
            k += 1;
        }
        let (body_span, next) = if self.is(k, "{") {
            let end = self.close_of(k);
            (Some((self.toks[k].start, self.toks[end].end)), end + 1)
        } else {
            (None, (k + 1).min(limit))
        };

        if lparen == header_start || !self.is_ident(lparen - 1) {
            return (None, next);
        }
        let name = self.text(lparen - 1).to_string();
        let ret_toks = &self.toks[header_start..lparen - 1];
        // constructors have no return type, at most a `<T>` group
        let only_type_params = ret_toks.is_empty() || {
            let mut depth = 0i32;
            let mut closed_at = None;
            for (n, t) in ret_toks.iter().enumerate() {
                match t.text(self.src) {
                    "<" => depth += 1,
                    ">" => {
                        depth -= 1;
                        if depth == 0 {
                            closed_at = Some(n);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            ret_toks[0].is_punct(self.src, "<") && closed_at == Some(ret_toks.len() - 1)
        };
        if only_type_params {
            return (None, next);
        }
        let return_type = join_tokens(self.src, &strip_annotations(self.src, ret_toks));
        let params = self.params(lparen + 1, rparen);
        if kind == ClassKind::Interface
            && !mods.iter().any(|m| m == "private" || m == "public")
        {
            mods.insert(0, "public".to_string());
        }
        (
            Some(MethodSig {
                name,
                return_type,
                params,
                modifiers: mods,
                owner: owner.to_string(),
                doc,
                body_span,
            }),
            next,
        )
    }

    fn params(&self, from: usize, to: usize) -> Vec<Param> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = from;
        for i in from..=to {
            let t = if i < to { self.text(i) } else { "," };
            match t {
                "<" | "(" | "[" => depth += 1,
                ">" | ")" | "]" => depth -= 1,
                "," if depth <= 0 || i == to => {
                    if let Some(p) = self.param(&self.toks[start..i]) {
                        out.push(p);
                    }
                    start = i + 1;
                }
                _ => {}
            }
        }
        out
    }

    fn param(&self, toks: &[Token]) -> Option<Param> {
        let mut toks: Vec<Token> = strip_annotations(self.src, toks)
            .into_iter()
            .filter(|t| t.text(self.src) != "final")
            .collect();
        // C-style array declarator: `int a[]`
        let mut dims = String::new();
        while toks.len() >= 3
            && toks[toks.len() - 1].text(self.src) == "]"
            && toks[toks.len() - 2].text(self.src) == "["
        {
            toks.truncate(toks.len() - 2);
            dims.push_str("[]");
        }
        let name = toks.pop()?;
        if name.kind != TokenKind::Ident || toks.is_empty() {
            return None;
        }
        Some(Param {
            ty: join_tokens(self.src, &toks) + &dims,
            name: name.text(self.src).to_string(),
        })
    }
}

fn strip_annotations(src: &str, toks: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i].is_punct(src, "@") {
            i += 1;
            while i < toks.len() && toks[i].kind == TokenKind::Ident {
                i += 1;
                if i + 1 < toks.len()
                    && toks[i].is_punct(src, ".")
                    && toks[i + 1].kind == TokenKind::Ident
                {
                    i += 1;
                } else {
                    break;
                }
            }
            if i < toks.len() && toks[i].is_punct(src, "(") {
                let mut depth = 0;
                while i < toks.len() {
                    if toks[i].is_punct(src, "(") {
                        depth += 1;
                    } else if toks[i].is_punct(src, ")") {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
        } else {
            out.push(toks[i]);
            i += 1;
        }
    }
    out
}
