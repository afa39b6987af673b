use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Comment(String),
    Sym(&'static str),
    Newline,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: [&str; 16] = [":=", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", "=", ":", ";"];

pub fn lex(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let span = Span::new(ln + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                let body: String = chars[i + 1..].iter().collect();
                out.push(Token { tok: Tok::Comment(body.trim().to_string()), span });
                i = chars.len();
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), span });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), span });
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    errors.push(Diagnostic::error(span, "unterminated string").with_hint("close the string with `\"` on the same line"));
                    break;
                }
                out.push(Token { tok: Tok::Str(chars[start..i].iter().collect()), span });
                i += 1;
            } else if let Some(s) = SYMBOLS.iter().find(|s| line[char_offset(line, i)..].starts_with(**s)) {
                out.push(Token { tok: Tok::Sym(s), span });
                i += s.chars().count();
            } else {
                errors.push(Diagnostic::error(span, format!("unexpected character `{c}`")));
                i += 1;
            }
        }
        out.push(Token { tok: Tok::Newline, span: Span::new(ln + 1, chars.len() + 1) });
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

fn char_offset(s: &str, i: usize) -> usize {
    s.char_indices().nth(i).map_or(s.len(), |(o, _)| o)
}
