//! Tokenizer for the Java subset the analyzer needs.
//!
//! The lexer is total: any input produces a token stream. Comments and
//! literals are kept as distinct token kinds so that later passes can skip
//! them without re-scanning text, and so that a `class` keyword inside a
//! comment or a `foo(` inside a string never contributes structure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Ident,
    Number,
    StringLit,
    TextBlock,
    CharLit,
    LineComment,
    BlockComment,
    /// `/** ... */`
    DocComment,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first byte.
    pub start: usize,
    /// Byte offset one past the last byte.
    pub end: usize,
    /// 1-based line of `start`.
    pub line: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn is_comment(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::LineComment | TokenKind::BlockComment | TokenKind::DocComment
        )
    }

    pub fn is_punct(&self, src: &str, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text(src) == p
    }

    pub fn is_ident(&self, src: &str, name: &str) -> bool {
        self.kind == TokenKind::Ident && self.text(src) == name
    }
}

const MULTI_PUNCT: [&str; 3] = ["...", "::", "->"];

pub fn tokenize(src: &str) -> Vec<Token> {
    Lexer::new(src).run()
}

/// Tokens with all comments removed.
pub fn code_tokens(src: &str) -> Vec<Token> {
    tokenize(src).into_iter().filter(|t| !t.is_comment()).collect()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    out: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            out: Vec::new(),
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn run(mut self) -> Vec<Token> {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            match b {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' | 0x0c => self.pos += 1,
                b'/' if self.peek(1) == Some(b'/') => self.line_comment(),
                b'/' if self.peek(1) == Some(b'*') => self.block_comment(),
                b'"' if self.peek(1) == Some(b'"') && self.peek(2) == Some(b'"') => {
                    self.text_block()
                }
                b'"' => self.quoted(b'"', TokenKind::StringLit),
                b'\'' => self.quoted(b'\'', TokenKind::CharLit),
                b'0'..=b'9' => self.number(),
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => self.number(),
                _ => {
                    let ch = self.src[self.pos..].chars().next().unwrap_or('\0');
                    if is_ident_start(ch) {
                        self.ident();
                    } else {
                        self.punct(ch);
                    }
                }
            }
        }
        self.out
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: usize) {
        self.out.push(Token {
            kind,
            start,
            end: self.pos,
            line,
        });
    }

    fn advance_counting_lines(&mut self, to: usize) {
        let to = to.min(self.bytes.len());
        self.line += self.bytes[self.pos..to].iter().filter(|&&b| b == b'\n').count();
        self.pos = to;
    }

    fn line_comment(&mut self) {
        let (start, line) = (self.pos, self.line);
        while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
            self.pos += 1;
        }
        self.push(TokenKind::LineComment, start, line);
    }

    fn block_comment(&mut self) {
        let (start, line) = (self.pos, self.line);
        // `/**/` is an empty block comment, not a doc comment
        let doc = self.peek(2) == Some(b'*') && self.peek(3) != Some(b'/');
        let end = match self.src[self.pos + 2..].find("*/") {
            Some(i) => self.pos + 2 + i + 2,
            None => self.bytes.len(),
        };
        self.advance_counting_lines(end);
        let kind = if doc {
            TokenKind::DocComment
        } else {
            TokenKind::BlockComment
        };
        self.push(kind, start, line);
    }

    fn text_block(&mut self) {
        let (start, line) = (self.pos, self.line);
        let mut i = self.pos + 3;
        let end = loop {
            match self.bytes.get(i) {
                None => break self.bytes.len(),
                Some(b'\\') => i += 2,
                Some(b'"') if self.bytes[i..].starts_with(b"\"\"\"") => break i + 3,
                Some(_) => i += 1,
            }
        };
        self.advance_counting_lines(end);
        self.push(TokenKind::TextBlock, start, line);
    }

    /// String and char literals end at the closing quote or, when
    /// unterminated, at the end of the line.
    fn quoted(&mut self, quote: u8, kind: TokenKind) {
        let (start, line) = (self.pos, self.line);
        self.pos += 1;
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'\\' => {
                    if self.peek(1) == Some(b'\n') {
                        break;
                    }
                    self.pos += 2;
                }
                b'\n' => break,
                b if b == quote => {
                    self.pos += 1;
                    break;
                }
                _ => self.pos += 1,
            }
        }
        self.pos = self.pos.min(self.bytes.len());
        self.push(kind, start, line);
    }

    fn number(&mut self) {
        let (start, line) = (self.pos, self.line);
        let hex = self.bytes[self.pos] == b'0' && matches!(self.peek(1), Some(b'x' | b'X'));
        while let Some(b) = self.peek(0) {
            let exp_sign = !hex
                && (b == b'+' || b == b'-')
                && matches!(self.bytes.get(self.pos.wrapping_sub(1)), Some(b'e' | b'E'));
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || exp_sign {
                // stop before `...` or a method call on a literal
                if b == b'.' && !matches!(self.peek(1), Some(b'0'..=b'9')) {
                    break;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
        self.push(TokenKind::Number, start, line);
    }

    fn ident(&mut self) {
        let (start, line) = (self.pos, self.line);
        for ch in self.src[self.pos..].chars() {
            if is_ident_part(ch) {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
        self.push(TokenKind::Ident, start, line);
    }

    fn punct(&mut self, ch: char) {
        let (start, line) = (self.pos, self.line);
        let rest = &self.src[self.pos..];
        let len = MULTI_PUNCT
            .iter()
            .find(|p| rest.starts_with(**p))
            .map(|p| p.len())
            .unwrap_or(ch.len_utf8());
        self.pos += len;
        self.push(TokenKind::Punct, start, line);
    }
}

pub fn is_ident_start(ch: char) -> bool {
    ch.is_alphabetic() || ch == '_' || ch == '$'
}

pub fn is_ident_part(ch: char) -> bool {
    ch.is_alphanumeric() || ch == '_' || ch == '$'
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_part)
}

/// Java reserved words and literals. None of them can name a method.
pub const RESERVED: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

pub fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}
