use std::fmt::Write;

use super::ast::{Ast, Document, ItemKind, Op, Reality};

fn needs_parens(parent: Op, child: &Ast, right: bool) -> bool {
    let (p, c) = (parent.prec(), child.prec());
    // operators associate to the left, so an equal-precedence right child keeps
    // its parentheses
    c < p || (right && c == p)
}

fn child(out: &mut String, parent: Op, a: &Ast, right: bool) {
    if needs_parens(parent, a, right) {
        out.push('(');
        expr_into(out, a);
        out.push(')');
    } else {
        expr_into(out, a);
    }
}

fn expr_into(out: &mut String, a: &Ast) {
    match a {
        Ast::Num(n) => write!(out, "{n}").unwrap(),
        Ast::Ident(n, _) => out.push_str(n),
        Ast::Call(n, args, _) => {
            out.push_str(n);
            out.push('(');
            for (k, x) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                expr_into(out, x);
            }
            out.push(')');
        }
        Ast::Neg(x) => {
            out.push('-');
            if x.prec() < 3 {
                out.push('(');
                expr_into(out, x);
                out.push(')');
            } else {
                expr_into(out, x);
            }
        }
        Ast::Bin(op, l, r) => {
            child(out, *op, l, false);
            match op {
                Op::Add | Op::Sub => write!(out, " {} ", op.symbol()).unwrap(),
                _ => out.push_str(op.symbol()),
            }
            child(out, *op, r, true);
        }
    }
}

/// Canonical text of an expression with minimal parentheses.
pub fn print_expr(a: &Ast) -> String {
    let mut s = String::new();
    expr_into(&mut s, a);
    s
}

fn reality(r: &Reality) -> String {
    match r {
        Reality::Real => "real".into(),
        Reality::Complex(c) => format!("complex {c}"),
    }
}

fn block<T>(out: &mut String, head: &str, entries: &[T], mut line: impl FnMut(&T) -> String) {
    if entries.is_empty() {
        writeln!(out, "{head} {{}}").unwrap();
        return;
    }
    writeln!(out, "{head} {{").unwrap();
    for e in entries {
        writeln!(out, "  {}", line(e)).unwrap();
    }
    out.push_str("}\n");
}

/// Canonical text of a document. Parsing the output gives back an equal
/// document, and printing a canonical file reproduces it byte for byte.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for it in &doc.items {
        match &it.kind {
            ItemKind::Comment(c) if c.is_empty() => out.push_str("#\n"),
            ItemKind::Comment(c) => writeln!(out, "# {c}").unwrap(),
            ItemKind::Blank => out.push('\n'),
            ItemKind::Spec(n) => writeln!(out, "spec {n}").unwrap(),
            ItemKind::Compact(b) => writeln!(out, "compact {b}").unwrap(),
            ItemKind::Coordinates(n) => writeln!(out, "coordinates {n}").unwrap(),
            ItemKind::Param(n, r) => writeln!(out, "param {n} {}", reality(r)).unwrap(),
            ItemKind::Function { name, args, reality: r } => {
                writeln!(out, "fn {name}({}) {}", args.join(", "), reality(r)).unwrap()
            }
            ItemKind::Algebra { stem, n, dual, brackets } => {
                block(&mut out, &format!("algebra {stem} {n} dual {dual}"), brackets, |((a, b), e)| {
                    format!("[{a}, {b}] = {}", print_expr(e))
                })
            }
            ItemKind::Structure { stem, n, eqs } => {
                block(&mut out, &format!("structure {stem} {n}"), eqs, |(a, e)| format!("{a} = {}", print_expr(e)))
            }
            ItemKind::Coframe { stem, entries } => {
                block(&mut out, &format!("coframe {stem}"), entries, |(a, e)| format!("{a} = {}", print_expr(e)))
            }
            ItemKind::CoframeFromAcs { stem } => writeln!(out, "coframe {stem} from acs").unwrap(),
            ItemKind::Acs(rules) => block(&mut out, "acs", rules, |(a, e)| format!("J {a} = {}", print_expr(e))),
            ItemKind::Deform { stem, entries } => {
                block(&mut out, &format!("deform {stem}"), entries, |((j, k), e)| {
                    format!("sigma[{j}][{k}] = {}", print_expr(e))
                })
            }
            ItemKind::MetricIdentity => out.push_str("metric identity\n"),
            ItemKind::Metric(entries) => {
                block(&mut out, "metric", entries, |((j, k), e)| format!("h[{j}][{k}] = {}", print_expr(e)))
            }
            ItemKind::Form(n, e) => writeln!(out, "form {n} = {}", print_expr(e)).unwrap(),
            ItemKind::Claim(c) => {
                let args: Vec<String> = c.args.iter().map(print_expr).collect();
                write!(out, "claim {}: {}({})", c.id, c.kind, args.join(", ")).unwrap();
                if !c.subs.is_empty() {
                    let subs: Vec<String> = c.subs.iter().map(|(n, e)| format!("{n} := {}", print_expr(e))).collect();
                    write!(out, " where {}", subs.join(", ")).unwrap();
                }
                writeln!(out, " {} \"{}\"", c.provenance.keyword(), c.provenance.text()).unwrap();
            }
        }
    }
    out
}
