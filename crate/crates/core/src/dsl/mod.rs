//! The `.pk` manifold description format: lexer, parser with spanned
//! diagnostics, canonical printer, and the loader that builds a
//! [`ManifoldSpec`](crate::catalog::ManifoldSpec).

pub mod ast;
mod lexer;
pub(crate) mod load;
mod parser;
mod printer;

use std::fmt;

use serde::Serialize;

pub use ast::{Ast, ClaimDecl, Document, Item, ItemKind, Op, Provenance, Reality};
pub use load::{load, load_with, Subst};
pub use parser::{parse, parse_expr, BUILTIN_CALLS};
pub use printer::{print, print_expr};

/// A `line:col` position, both 1-based. Spans never take part in equality,
/// so reparsed documents compare equal to the originals.
#[derive(Clone, Copy, Debug, Default, Eq, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Span {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, span, message: message.into(), hint: None }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Diagnostic {
        self.hint = Some(hint.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.span.line, self.span.col, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, "\n  hint: {h}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
