use std::collections::HashMap;

use num_bigint::BigInt;

use super::ast::{Ast, ClaimDecl, Document, Item, ItemKind, Op, Provenance, Reality};
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};

/// Names callable without a declaration.
pub const BUILTIN_CALLS: [&str; 5] = ["d", "conj", "re", "im", "diff"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos.min(self.toks.len() - 1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Str(_) => "a string".into(),
            Tok::Comment(_) => "a comment".into(),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Newline => "end of line".into(),
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.at_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(Diagnostic::error(self.span(), format!("expected `{s}`, found {}", self.describe())))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(Diagnostic::error(self.span(), format!("expected `{w}`, found {}", self.describe())))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(Diagnostic::error(self.span(), format!("expected a name, found {}", self.describe()))),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let sp = self.bump().span;
                s.parse().map_err(|_| Diagnostic::error(sp, "integer out of range"))
            }
            _ => Err(Diagnostic::error(self.span(), format!("expected an integer, found {}", self.describe()))),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(Diagnostic::error(self.span(), format!("expected a quoted string, found {}", self.describe()))),
        }
    }

    fn skip_comment(&mut self) {
        if matches!(self.peek(), Tok::Comment(_)) {
            self.bump();
        }
    }

    fn end_of_line(&mut self) -> PResult<()> {
        self.skip_comment();
        if matches!(self.peek(), Tok::Newline) {
            self.bump();
            Ok(())
        } else {
            Err(Diagnostic::error(self.span(), format!("expected end of line, found {}", self.describe())))
        }
    }

    fn skip_blank(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Comment(_)) && self.pos + 1 < self.toks.len() {
            self.bump();
        }
    }

    fn reality(&mut self) -> PResult<Reality> {
        if self.at_word("real") {
            self.bump();
            Ok(Reality::Real)
        } else if self.at_word("complex") {
            self.bump();
            Ok(Reality::Complex(self.ident()?.0))
        } else {
            Err(Diagnostic::error(self.span(), format!("expected `real` or `complex`, found {}", self.describe()))
                .with_hint("write `real`, or `complex NAME` with the name of the conjugate"))
        }
    }

    /// `{ entry (; | newline) … }`, also on a single line.
    fn block<T>(&mut self, mut entry: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        loop {
            while self.at_sym(";") || matches!(self.peek(), Tok::Newline | Tok::Comment(_)) {
                if self.pos + 1 >= self.toks.len() {
                    return Err(Diagnostic::error(self.span(), "unterminated block").with_hint("close the block with `}`"));
                }
                self.bump();
            }
            if self.at_sym("}") {
                self.bump();
                return Ok(out);
            }
            out.push(entry(self)?);
            if !(self.at_sym(";") || self.at_sym("}") || matches!(self.peek(), Tok::Newline | Tok::Comment(_))) {
                return Err(Diagnostic::error(self.span(), format!("expected `;`, newline or `}}`, found {}", self.describe())));
            }
        }
    }

    fn index_pair(&mut self, head: &str) -> PResult<(usize, usize)> {
        self.expect_word(head)?;
        self.expect_sym("[")?;
        let a = self.int()?;
        self.expect_sym("]")?;
        self.expect_sym("[")?;
        let b = self.int()?;
        self.expect_sym("]")?;
        Ok((a, b))
    }

    fn expr(&mut self) -> PResult<Ast> {
        self.binary(1)
    }

    fn binary(&mut self, min: u8) -> PResult<Ast> {
        let mut lhs = if min <= 3 { self.unary()? } else { self.atom()? };
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => Op::Add,
                Tok::Sym("-") => Op::Sub,
                Tok::Sym("*") => Op::Mul,
                Tok::Sym("/") => Op::Div,
                Tok::Sym("^") => Op::Caret,
                _ => return Ok(lhs),
            };
            if op.prec() < min {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.binary(op.prec() + 1)?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Ast> {
        if self.at_sym("-") {
            self.bump();
            let inner = self.binary(3)?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.binary(4)
    }

    fn atom(&mut self) -> PResult<Ast> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(Ast::Num(s.parse::<BigInt>().expect("digits")))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.at_sym("(") {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.at_sym(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.at_sym(",") {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Ast::Call(name, args, span))
                } else {
                    Ok(Ast::Ident(name, span))
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("-") => self.unary(),
            _ => Err(Diagnostic::error(span, format!("expected an expression, found {}", self.describe()))),
        }
    }

    fn item(&mut self) -> PResult<Item> {
        let span = self.span();
        if let Tok::Comment(c) = self.peek().clone() {
            self.bump();
            self.end_of_line()?;
            return Ok(Item { span, kind: ItemKind::Comment(c) });
        }
        let (kw, kw_span) = self.ident()?;
        let kind = match kw.as_str() {
            "spec" => ItemKind::Spec(self.ident()?.0),
            "compact" => match self.ident()?.0.as_str() {
                "true" => ItemKind::Compact(true),
                "false" => ItemKind::Compact(false),
                _ => return Err(Diagnostic::error(kw_span, "expected `compact true` or `compact false`")),
            },
            "coordinates" => ItemKind::Coordinates(self.int()?),
            "param" => {
                let name = self.ident()?.0;
                ItemKind::Param(name, self.reality()?)
            }
            "fn" => {
                let name = self.ident()?.0;
                self.expect_sym("(")?;
                let mut args = Vec::new();
                while !self.at_sym(")") {
                    args.push(self.ident()?.0);
                    if self.at_sym(",") {
                        self.bump();
                    }
                }
                self.bump();
                ItemKind::Function { name, args, reality: self.reality()? }
            }
            "algebra" => {
                let stem = self.ident()?.0;
                let n = self.int()?;
                self.expect_word("dual")?;
                let dual = self.ident()?.0;
                let brackets = self.block(|p| {
                    p.expect_sym("[")?;
                    let a = p.ident()?.0;
                    p.expect_sym(",")?;
                    let b = p.ident()?.0;
                    p.expect_sym("]")?;
                    p.expect_sym("=")?;
                    Ok(((a, b), p.expr()?))
                })?;
                ItemKind::Algebra { stem, n, dual, brackets }
            }
            "structure" => {
                let stem = self.ident()?.0;
                let n = self.int()?;
                let eqs = self.block(|p| {
                    let name = p.ident()?.0;
                    p.expect_sym("=")?;
                    Ok((name, p.expr()?))
                })?;
                ItemKind::Structure { stem, n, eqs }
            }
            "coframe" => {
                let stem = if let Tok::Ident(s) = self.peek().clone() {
                    self.bump();
                    s
                } else {
                    "phi".to_string()
                };
                if self.at_word("from") {
                    self.bump();
                    self.expect_word("acs")?;
                    ItemKind::CoframeFromAcs { stem }
                } else {
                    let entries = self.block(|p| {
                        let name = p.ident()?.0;
                        p.expect_sym("=")?;
                        Ok((name, p.expr()?))
                    })?;
                    ItemKind::Coframe { stem, entries }
                }
            }
            "acs" => ItemKind::Acs(self.block(|p| {
                p.expect_word("J")?;
                let name = p.ident()?.0;
                p.expect_sym("=")?;
                Ok((name, p.expr()?))
            })?),
            "deform" => {
                let stem = if let Tok::Ident(s) = self.peek().clone() {
                    self.bump();
                    s
                } else {
                    "phit".to_string()
                };
                let entries = self.block(|p| {
                    let ij = p.index_pair("sigma")?;
                    p.expect_sym("=")?;
                    Ok((ij, p.expr()?))
                })?;
                ItemKind::Deform { stem, entries }
            }
            "metric" => {
                if self.at_word("identity") {
                    self.bump();
                    ItemKind::MetricIdentity
                } else {
                    ItemKind::Metric(self.block(|p| {
                        let ij = p.index_pair("h")?;
                        p.expect_sym("=")?;
                        Ok((ij, p.expr()?))
                    })?)
                }
            }
            "form" => {
                let name = self.ident()?.0;
                self.expect_sym("=")?;
                ItemKind::Form(name, self.expr()?)
            }
            "claim" => {
                let id = self.ident()?.0;
                self.expect_sym(":")?;
                let kind = self.ident()?.0;
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if !self.at_sym(")") {
                    loop {
                        args.push(self.expr()?);
                        if self.at_sym(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                let mut subs = Vec::new();
                if self.at_word("where") {
                    self.bump();
                    loop {
                        let name = self.ident()?.0;
                        self.expect_sym(":=")?;
                        subs.push((name, self.expr()?));
                        if self.at_sym(",") {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                let (word, wspan) = self.ident().map_err(|d| d.with_hint("every claim ends with `stated \"…\"`, `derived \"…\"` or `trivial \"…\"`"))?;
                let text = self.string()?;
                let provenance = match word.as_str() {
                    "stated" => Provenance::Stated(text),
                    "derived" => Provenance::Derived(text),
                    "trivial" => Provenance::Trivial(text),
                    _ => {
                        return Err(Diagnostic::error(wspan, format!("unknown provenance `{word}`"))
                            .with_hint("use `stated`, `derived` or `trivial`"))
                    }
                };
                ItemKind::Claim(ClaimDecl { id, kind, args, subs, provenance })
            }
            other => {
                return Err(Diagnostic::error(kw_span, format!("unknown declaration `{other}`")).with_hint(
                    "expected one of spec, compact, coordinates, param, fn, algebra, structure, coframe, acs, deform, metric, form, claim",
                ))
            }
        };
        self.end_of_line()?;
        Ok(Item { span, kind })
    }
}

/// Parse a document; semantic checks that need the geometry are left to
/// loading.
pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Ok(Document::default());
    }
    let mut p = Parser { toks, pos: 0 };
    let mut items = Vec::new();
    let mut diags = Vec::new();
    loop {
        let mut blank = false;
        while matches!(p.peek(), Tok::Newline) && p.pos + 1 < p.toks.len() {
            blank = true;
            p.bump();
        }
        if matches!(p.peek(), Tok::Newline) {
            break;
        }
        if blank && !items.is_empty() {
            items.push(Item { span: p.span(), kind: ItemKind::Blank });
        }
        match p.item() {
            Ok(it) => items.push(it),
            Err(d) => {
                diags.push(d);
                // resynchronize at the next line
                while !matches!(p.peek(), Tok::Newline) {
                    p.bump();
                }
                p.skip_blank();
            }
        }
    }
    let doc = Document { items };
    diags.extend(validate(&doc));
    if diags.is_empty() {
        Ok(doc)
    } else {
        Err(diags)
    }
}

/// Duplicate declarations, calls to undeclared functions, and references to
/// forms declared further down.
fn validate(doc: &Document) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut declared: HashMap<String, Span> = HashMap::new();
    let mut fns: Vec<String> = Vec::new();
    let later_forms: HashMap<&str, usize> = doc
        .items
        .iter()
        .enumerate()
        .filter_map(|(k, it)| match &it.kind {
            ItemKind::Form(n, _) => Some((n.as_str(), k)),
            _ => None,
        })
        .collect();
    let mut declare = |name: &str, span: Span, diags: &mut Vec<Diagnostic>| {
        if let Some(prev) = declared.get(name) {
            diags.push(
                Diagnostic::error(span, format!("`{name}` is already declared"))
                    .with_hint(format!("first declared at {}:{}", prev.line, prev.col)),
            );
        } else {
            declared.insert(name.to_string(), span);
        }
    };
    for (k, it) in doc.items.iter().enumerate() {
        let mut exprs: Vec<&Ast> = Vec::new();
        match &it.kind {
            ItemKind::Param(n, r) => {
                declare(n, it.span, &mut diags);
                if let Reality::Complex(c) = r {
                    declare(c, it.span, &mut diags);
                }
            }
            ItemKind::Function { name, reality, .. } => {
                declare(name, it.span, &mut diags);
                fns.push(name.clone());
                if let Reality::Complex(c) = reality {
                    declare(c, it.span, &mut diags);
                    fns.push(c.clone());
                }
            }
            ItemKind::Form(n, e) => {
                declare(n, it.span, &mut diags);
                exprs.push(e);
            }
            ItemKind::Claim(c) => {
                declare(&format!("claim {}", c.id), it.span, &mut diags);
                exprs.extend(c.args.iter());
                exprs.extend(c.subs.iter().map(|(_, e)| e));
            }
            ItemKind::Algebra { brackets, .. } => exprs.extend(brackets.iter().map(|(_, e)| e)),
            ItemKind::Structure { eqs, .. } => exprs.extend(eqs.iter().map(|(_, e)| e)),
            ItemKind::Coframe { entries, .. } => exprs.extend(entries.iter().map(|(_, e)| e)),
            ItemKind::Acs(rules) => exprs.extend(rules.iter().map(|(_, e)| e)),
            ItemKind::Deform { entries, .. } => exprs.extend(entries.iter().map(|(_, e)| e)),
            ItemKind::Metric(entries) => exprs.extend(entries.iter().map(|(_, e)| e)),
            _ => {}
        }
        for e in exprs {
            let mut names = Vec::new();
            e.names(&mut names);
            for (name, span, is_call) in names {
                if is_call && !BUILTIN_CALLS.contains(&name.as_str()) && !fns.contains(&name) {
                    diags.push(
                        Diagnostic::error(span, format!("unknown function symbol `{name}`"))
                            .with_hint(format!("declare it first, e.g. `fn {name}(x2, y2) real`")),
                    );
                }
                if !is_call && later_forms.get(name.as_str()).is_some_and(|&j| j >= k) {
                    diags.push(Diagnostic::error(span, format!("form `{name}` is used before its declaration")));
                }
            }
        }
    }
    diags
}

/// Parse a single expression, as used by `--at NAME=VALUE`.
pub fn parse_expr(text: &str) -> Result<Ast, Vec<Diagnostic>> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(vec![Diagnostic::error(Span::new(1, 1), "empty expression")]);
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr().map_err(|d| vec![d])?;
    if !matches!(p.peek(), Tok::Newline) || p.pos + 1 < p.toks.len() {
        return Err(vec![Diagnostic::error(p.span(), format!("unexpected {} after expression", p.describe()))]);
    }
    Ok(e)
}
