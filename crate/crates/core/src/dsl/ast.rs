use num_bigint::BigInt;

use super::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    /// Wedge between forms; a power when the right side is an integer
    /// literal.
    Caret,
}

impl Op {
    pub fn prec(self) -> u8 {
        match self {
            Op::Add | Op::Sub => 1,
            Op::Mul | Op::Div => 2,
            Op::Caret => 4,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Caret => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Ident(String, Span),
    Call(String, Vec<Ast>, Span),
    Neg(Box<Ast>),
    Bin(Op, Box<Ast>, Box<Ast>),
}

impl Ast {
    pub fn prec(&self) -> u8 {
        match self {
            Ast::Bin(op, ..) => op.prec(),
            Ast::Neg(_) => 3,
            _ => 5,
        }
    }

    /// Every identifier and call in the tree, with spans.
    pub fn names(&self, out: &mut Vec<(String, Span, bool)>) {
        match self {
            Ast::Num(_) => {}
            Ast::Ident(n, s) => out.push((n.clone(), *s, false)),
            Ast::Call(n, args, s) => {
                out.push((n.clone(), *s, true));
                for a in args {
                    a.names(out);
                }
            }
            Ast::Neg(a) => a.names(out),
            Ast::Bin(_, a, b) => {
                a.names(out);
                b.names(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reality {
    Real,
    Complex(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Reference data asserted as given.
    Stated(String),
    Derived(String),
    Trivial(String),
}

impl Provenance {
    pub fn keyword(&self) -> &'static str {
        match self {
            Provenance::Stated(_) => "stated",
            Provenance::Derived(_) => "derived",
            Provenance::Trivial(_) => "trivial",
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Provenance::Stated(s) | Provenance::Derived(s) | Provenance::Trivial(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimDecl {
    pub id: String,
    pub kind: String,
    pub args: Vec<Ast>,
    pub subs: Vec<(String, Ast)>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ItemKind {
    Comment(String),
    /// A run of empty lines, kept so that printing preserves layout.
    Blank,
    Spec(String),
    Compact(bool),
    Coordinates(usize),
    Param(String, Reality),
    Function { name: String, args: Vec<String>, reality: Reality },
    /// `[Z_i, Z_j] = Σ c Z_k` on the vectors dual to `stem1..stemn`.
    Algebra { stem: String, n: usize, dual: String, brackets: Vec<((String, String), Ast)> },
    /// `d e^b = …` for an invariant complex coframe `stem1..stemn`.
    Structure { stem: String, n: usize, eqs: Vec<(String, Ast)> },
    Coframe { stem: String, entries: Vec<(String, Ast)> },
    CoframeFromAcs { stem: String },
    Acs(Vec<(String, Ast)>),
    Deform { stem: String, entries: Vec<((usize, usize), Ast)> },
    MetricIdentity,
    Metric(Vec<((usize, usize), Ast)>),
    Form(String, Ast),
    Claim(ClaimDecl),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub span: Span,
    pub kind: ItemKind,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Document {
    pub items: Vec<Item>,
}

impl Document {
    pub fn name(&self) -> Option<&str> {
        self.items.iter().find_map(|i| match &i.kind {
            ItemKind::Spec(n) => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn claims(&self) -> impl Iterator<Item = &ClaimDecl> {
        self.items.iter().filter_map(|i| match &i.kind {
            ItemKind::Claim(c) => Some(c),
            _ => None,
        })
    }
}
