use super::ast::Span;
use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    TyVar(String),
    /// `#l`
    Hash(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: &[&str] = &[
    "datatype", "type", "of", "val", "fun", "fn", "case", "if", "then", "else", "let", "in", "end", "andalso",
    "orelse", "as", "and", "true", "false", "rec", "op",
];

// Longest first.
const SYMBOLS: &[&str] = &[
    "=>", "->", "<>", "<=", ">=", "::", "(", ")", "[", "]", "{", "}", ",", ";", "|", "=", "<", ">", "+", "-", "*", "~",
    ":", "_",
];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("(*") {
            let start = i;
            let mut depth = 0;
            loop {
                if i >= bytes.len() {
                    return Err(FrontendError::syntax(Span::new(start, i), "unterminated comment"));
                }
                if src[i..].starts_with("(*") {
                    depth += 1;
                    i += 2;
                } else if src[i..].starts_with("*)") {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    i += src[i..].chars().next().map_or(1, char::len_utf8);
                }
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '~' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let neg = c == '~';
            if neg {
                i += 1;
            }
            let ds = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &src[ds..i];
            let n: i64 = if neg { format!("-{digits}").parse() } else { digits.parse() }
                .map_err(|_| FrontendError::syntax(Span::new(start, i), "integer literal out of range"))?;
            out.push(Token { tok: Tok::Int(n), span: Span::new(start, i) });
            continue;
        }
        if c == '\'' {
            i += 1;
            while i < bytes.len() && ident_char(bytes[i] as char) {
                i += 1;
            }
            out.push(Token { tok: Tok::TyVar(src[start..i].to_string()), span: Span::new(start, i) });
            continue;
        }
        if c == '#' {
            i += 1;
            let ls = i;
            while i < bytes.len() && ident_char(bytes[i] as char) {
                i += 1;
            }
            if ls == i {
                return Err(FrontendError::syntax(Span::new(start, i), "expected a label after `#`"));
            }
            out.push(Token { tok: Tok::Hash(src[ls..i].to_string()), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || (c == '_' && bytes.get(i + 1).is_some_and(|b| ident_char(*b as char))) {
            while i < bytes.len() && ident_char(bytes[i] as char) {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                out.push(Token { tok: Tok::Sym(s), span: Span::new(start, i) });
            }
            None => {
                let ch = src[i..].chars().next().expect("in bounds");
                return Err(FrontendError::syntax(
                    Span::new(start, start + ch.len_utf8()),
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}
