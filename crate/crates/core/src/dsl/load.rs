use std::collections::HashMap;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::ast::{Ast, Document, ItemKind, Op, Reality};
use super::{Diagnostic, Span};
use crate::acs::{AlmostComplexStructure, DeformationFamily};
use crate::catalog::ManifoldSpec;
use crate::deform::MetricFamily;
use crate::error::Error;
use crate::exterior::{Basis, Coframe, Form, Frame, Matrix, Word};
use crate::symexpr::{Expr, FnSym, Var};

/// Substitutions `NAME := expr` for parameters and function symbols,
/// applied to the document before it is evaluated.
pub type Subst = Vec<(String, Ast)>;

/// A value of the expression language.
#[derive(Clone, Debug)]
pub enum Val {
    Scalar(Expr),
    Form(Form),
}

impl Val {
    pub fn into_form(self, basis: &Arc<Basis>) -> Form {
        match self {
            Val::Scalar(e) => Form::scalar(basis, e),
            Val::Form(f) => f,
        }
    }
}

fn err(span: Span, e: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error(span, e.to_string())
}

/// Name resolution and evaluation for one loaded document.
#[derive(Clone, Debug)]
pub struct Env {
    pub basis: Arc<Basis>,
    pub frame: Option<Frame>,
    params: HashMap<String, Var>,
    fns: HashMap<String, (FnSym, bool)>,
    coframes: Vec<Coframe>,
    forms: HashMap<String, Form>,
    extra: Option<Arc<Basis>>,
}

fn indexed(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl Env {
    fn new(basis: Arc<Basis>, frame: Option<Frame>) -> Env {
        Env {
            basis,
            frame,
            params: HashMap::new(),
            fns: HashMap::new(),
            coframes: Vec::new(),
            forms: HashMap::new(),
            extra: None,
        }
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        if let Some(v) = self.params.get(name) {
            return Some(v.clone());
        }
        self.frame.as_ref().and_then(|f| f.coord(name)).cloned()
    }

    fn resolve(&self, name: &str, span: Span) -> Result<Val, Diagnostic> {
        if let Some(i) = self.basis.index_of(name) {
            return Ok(Val::Form(Form::covector(&self.basis, i)));
        }
        if let Some(fr) = self.frame.as_ref().filter(|f| f.coords().next().is_some()) {
            let conv = |r: crate::error::Result<Form>| r.map(Val::Form).map_err(|e| err(span, e));
            let convs = |r: crate::error::Result<Expr>| r.map(Val::Scalar).map_err(|e| err(span, e));
            if let Some(j) = indexed(name, "dzbar") {
                return conv(fr.dzbar(j));
            }
            if let Some(j) = indexed(name, "dz") {
                return conv(fr.dz(j));
            }
            if let Some(j) = indexed(name, "zbar") {
                return convs(fr.zbar(j));
            }
            if let Some(j) = indexed(name, "z") {
                return convs(fr.z(j));
            }
            if let Some(v) = fr.coord(name) {
                return Ok(Val::Scalar(Expr::var(v)));
            }
        }
        if let Some(v) = self.params.get(name) {
            return Ok(Val::Scalar(Expr::var(v)));
        }
        if name == "i" {
            return Ok(Val::Scalar(Expr::i()));
        }
        for cf in &self.coframes {
            if let Some(i) = cf.basis().index_of(name) {
                return Ok(Val::Form(cf.forms()[i].clone()));
            }
        }
        if let Some(f) = self.forms.get(name) {
            return Ok(Val::Form(f.clone()));
        }
        if let Some((f, conj)) = self.fns.get(name) {
            let e = Expr::func(f);
            return Ok(Val::Scalar(if *conj { e.conj() } else { e }));
        }
        if let Some(b) = &self.extra {
            if let Some(i) = b.index_of(name) {
                return Ok(Val::Form(Form::covector(b, i)));
            }
        }
        Err(Diagnostic::error(span, format!("unknown name `{name}`")))
    }

    fn promote(&self, v: Val) -> Form {
        v.into_form(&self.basis)
    }

    /// Evaluate an expression; `at` locates errors in nodes without a span.
    pub fn eval(&self, a: &Ast, at: Span) -> Result<Val, Diagnostic> {
        match a {
            Ast::Num(n) => {
                let k = n.to_i64().ok_or_else(|| err(at, "integer literal out of range"))?;
                Ok(Val::Scalar(Expr::int(k)))
            }
            Ast::Ident(n, s) => self.resolve(n, *s),
            Ast::Neg(x) => Ok(match self.eval(x, at)? {
                Val::Scalar(e) => Val::Scalar(-e),
                Val::Form(f) => Val::Form(-f),
            }),
            Ast::Call(name, args, s) => self.call(name, args, *s),
            Ast::Bin(op, l, r) => {
                if *op == Op::Caret {
                    // an integer exponent is a power, of a scalar or under the wedge
                    if let Ast::Num(k) = r.as_ref() {
                        let k = k.to_u32().ok_or_else(|| err(at, "exponent out of range"))?;
                        return Ok(match self.eval(l, at)? {
                            Val::Scalar(e) => Val::Scalar(e.pow(k)),
                            Val::Form(f) => Val::Form(f.wedge_pow(k as usize)),
                        });
                    }
                }
                let lv = self.eval(l, at)?;
                let rv = self.eval(r, at)?;
                self.binary(*op, lv, rv, at)
            }
        }
    }

    fn binary(&self, op: Op, l: Val, r: Val, at: Span) -> Result<Val, Diagnostic> {
        use Val::{Form as F, Scalar as S};
        Ok(match (op, l, r) {
            (Op::Add, S(a), S(b)) => S(a + b),
            (Op::Sub, S(a), S(b)) => S(a - b),
            (Op::Add | Op::Sub, a, b) => {
                let (a, b) = (self.promote(a), self.promote(b));
                let r = if op == Op::Add { a.checked_add(&b) } else { a.checked_sub(&b) };
                F(r.map_err(|e| err(at, e))?)
            }
            (Op::Mul, S(a), S(b)) => S(a * b),
            (Op::Mul, S(a), F(f)) | (Op::Mul, F(f), S(a)) => F(f.scale(&a)),
            (Op::Mul, F(_), F(_)) => {
                return Err(err(at, "cannot multiply two forms").with_hint("use `^` for the wedge product"))
            }
            (Op::Div, _, F(_)) => return Err(err(at, "cannot divide by a form")),
            (Op::Div, S(a), S(b)) => S(a.checked_div(&b).map_err(|e| err(at, e))?),
            (Op::Div, F(f), S(b)) => F(f.try_map_coeffs(|c| c.checked_div(&b)).map_err(|e| err(at, e))?),
            (Op::Caret, a, b) => F(self.promote(a).wedge(&self.promote(b)).map_err(|e| err(at, e))?),
        })
    }

    fn call(&self, name: &str, args: &[Ast], span: Span) -> Result<Val, Diagnostic> {
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(err(span, format!("`{name}` takes {k} argument(s), got {}", args.len())))
            }
        };
        match name {
            "d" => {
                arity(1)?;
                let fr = self.frame.as_ref().ok_or_else(|| err(span, "`d` is not available before the frame is known"))?;
                Ok(Val::Form(match self.eval(&args[0], span)? {
                    Val::Scalar(e) => fr.d_scalar(&e),
                    Val::Form(f) => fr.d(&f),
                }
                .map_err(|e| err(span, e))?))
            }
            "conj" | "re" | "im" => {
                arity(1)?;
                let v = self.eval(&args[0], span)?;
                Ok(match (name, v) {
                    ("conj", Val::Scalar(e)) => Val::Scalar(e.conj()),
                    ("conj", Val::Form(f)) => Val::Form(f.conj()),
                    ("re", Val::Scalar(e)) => Val::Scalar(e.re()),
                    ("re", Val::Form(f)) => Val::Form(f.re()),
                    ("im", Val::Scalar(e)) => Val::Scalar(e.im()),
                    (_, Val::Form(f)) => Val::Form(f.scale(&-Expr::i()).re()),
                    _ => unreachable!(),
                })
            }
            "diff" => {
                arity(2)?;
                let v = match &args[1] {
                    Ast::Ident(n, s) => self.var(n).ok_or_else(|| err(*s, format!("`{n}` is not a coordinate or parameter")))?,
                    _ => return Err(err(span, "the second argument of `diff` must be a variable name")),
                };
                Ok(match self.eval(&args[0], span)? {
                    Val::Scalar(e) => Val::Scalar(e.diff(&v)),
                    Val::Form(f) => Val::Form(f.map_coeffs(|c| c.diff(&v))),
                })
            }
            _ => {
                let (f, conj) = self
                    .fns
                    .get(name)
                    .ok_or_else(|| err(span, format!("unknown function symbol `{name}`")))?;
                let given: Vec<Option<&str>> = args
                    .iter()
                    .map(|a| match a {
                        Ast::Ident(n, _) => Some(n.as_str()),
                        _ => None,
                    })
                    .collect();
                let sym = if *conj { f.conj() } else { f.clone() };
                let declared: Vec<&str> = sym.args().iter().map(Var::name).collect();
                if given.len() != declared.len() || given.iter().zip(&declared).any(|(g, d)| *g != Some(*d)) {
                    return Err(err(span, format!("`{name}` is declared as {name}({})", declared.join(", ")))
                        .with_hint("apply functions to their declared arguments; substitute with `where` or `--at`"));
                }
                let e = Expr::func(f);
                Ok(Val::Scalar(if *conj { e.conj() } else { e }))
            }
        }
    }

    pub fn eval_form(&self, a: &Ast, at: Span) -> Result<Form, Diagnostic> {
        Ok(self.promote(self.eval(a, at)?))
    }

    pub fn eval_scalar(&self, a: &Ast, at: Span) -> Result<Expr, Diagnostic> {
        match self.eval(a, at)? {
            Val::Scalar(e) => Ok(e),
            Val::Form(f) if f.is_zero() => Ok(Expr::zero()),
            Val::Form(f) => match f.degree() {
                Ok(0) => Ok(f.coeff(Word(0))),
                _ => Err(err(at, format!("expected a scalar, found the form {f}"))),
            },
        }
    }
}

/// Replace parameters and function symbols by expressions. Conjugate names
/// receive the conjugated value.
pub fn substitute(doc: &Document, subs: &Subst) -> Result<Document, Vec<Diagnostic>> {
    if subs.is_empty() {
        return Ok(doc.clone());
    }
    let mut conj_of: HashMap<String, String> = HashMap::new();
    let mut declared: Vec<String> = Vec::new();
    for it in &doc.items {
        match &it.kind {
            ItemKind::Param(n, r) | ItemKind::Function { name: n, reality: r, .. } => {
                declared.push(n.clone());
                if let Reality::Complex(c) = r {
                    conj_of.insert(c.clone(), n.clone());
                    declared.push(c.clone());
                }
            }
            _ => {}
        }
    }
    let mut map: HashMap<String, Ast> = HashMap::new();
    let mut diags = Vec::new();
    for (n, v) in subs {
        if !declared.contains(n) {
            diags.push(Diagnostic::error(Span::default(), format!("cannot substitute `{n}`: not a declared parameter or function")));
            continue;
        }
        map.insert(n.clone(), v.clone());
        if let Some((c, _)) = conj_of.iter().find(|(_, h)| *h == n) {
            map.insert(c.clone(), Ast::Call("conj".into(), vec![v.clone()], Span::default()));
        } else if let Some(h) = conj_of.get(n) {
            map.insert(h.clone(), Ast::Call("conj".into(), vec![v.clone()], Span::default()));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    fn go(a: &Ast, map: &HashMap<String, Ast>) -> Ast {
        match a {
            Ast::Ident(n, _) | Ast::Call(n, _, _) if map.contains_key(n) => map[n].clone(),
            Ast::Call(n, args, s) => Ast::Call(n.clone(), args.iter().map(|x| go(x, map)).collect(), *s),
            Ast::Neg(x) => Ast::Neg(Box::new(go(x, map))),
            Ast::Bin(op, l, r) => Ast::Bin(*op, Box::new(go(l, map)), Box::new(go(r, map))),
            other => other.clone(),
        }
    }
    let mut out = doc.clone();
    for it in &mut out.items {
        let pairs: Vec<&mut Ast> = match &mut it.kind {
            ItemKind::Algebra { brackets, .. } => brackets.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Structure { eqs, .. } => eqs.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Coframe { entries, .. } => entries.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Acs(rules) => rules.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Deform { entries, .. } => entries.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Metric(entries) => entries.iter_mut().map(|(_, e)| e).collect(),
            ItemKind::Form(_, e) => vec![e],
            ItemKind::Claim(c) => c.args.iter_mut().chain(c.subs.iter_mut().map(|(_, e)| e)).collect(),
            _ => Vec::new(),
        };
        for e in pairs {
            *e = go(e, &map);
        }
    }
    Ok(out)
}

/// Load a parsed document.
pub fn load(doc: &Document) -> Result<ManifoldSpec, Vec<Diagnostic>> {
    load_with(doc, &Vec::new())
}

/// Load a document after substituting parameters and functions.
pub fn load_with(doc: &Document, subs: &Subst) -> Result<ManifoldSpec, Vec<Diagnostic>> {
    let original = doc.clone();
    let doc = substitute(doc, subs)?;
    let fixed: Vec<String> = subs
        .iter()
        .filter(|(n, _)| doc.items.iter().any(|it| matches!(&it.kind, ItemKind::Param(p, r) if p == n || matches!(r, Reality::Complex(c) if c == n))))
        .map(|(n, _)| n.clone())
        .collect();
    build(&doc, !fixed.is_empty()).map(|mut spec| {
        spec.document = original;
        spec.subs = subs.clone();
        spec
    }).map_err(|d| vec![d])
}

fn frame_of(doc: &Document) -> Result<(Frame, Option<String>, Span), Diagnostic> {
    let mut found: Option<(Frame, Option<String>, Span)> = None;
    for it in &doc.items {
        let frame = match &it.kind {
            ItemKind::Coordinates(n) => {
                if *n == 0 {
                    return Err(err(it.span, "need at least one complex coordinate"));
                }
                (Frame::real_coordinates(*n), None)
            }
            ItemKind::Algebra { stem, n, dual, brackets } => (algebra_frame(stem, *n, dual, brackets, it.span)?, Some(stem.clone())),
            ItemKind::Structure { stem, n, eqs } => (structure_frame(stem, *n, eqs, it.span)?, Some(stem.clone())),
            _ => continue,
        };
        if found.is_some() {
            return Err(err(it.span, "a document declares exactly one of coordinates, algebra or structure"));
        }
        found = Some((frame.0, frame.1, it.span));
    }
    found.ok_or_else(|| {
        Diagnostic::error(Span::new(1, 1), "no frame declared")
            .with_hint("add `coordinates N`, an `algebra` block or a `structure` block")
    })
}

fn algebra_frame(stem: &str, n: usize, dual: &str, brackets: &[((String, String), Ast)], span: Span) -> Result<Frame, Diagnostic> {
    let basis = Basis::complex_named(stem, n);
    let names: Vec<String> = (1..=n).map(|j| format!("{dual}{j}")).collect();
    let vectors = Basis::real(&names);
    let mut env = Env::new(basis.clone(), None);
    env.extra = Some(vectors.clone());
    let idx = |s: &str| names.iter().position(|x| x == s).ok_or_else(|| err(span, format!("`{s}` is not one of {dual}1..{dual}{n}")));
    // c[k][a][b] with [Z_a, Z_b] = Σ_k c^k_ab Z_k
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    for ((a, b), rhs) in brackets {
        let (a, b) = (idx(a)?, idx(b)?);
        if a == b {
            return Err(err(span, "a bracket of a vector with itself vanishes"));
        }
        let v = match env.eval(rhs, span)? {
            Val::Form(f) if Basis::same(f.basis(), &vectors) && f.degrees().iter().all(|&d| d == 1) => f,
            Val::Scalar(e) if e.is_zero() => Form::zero(&vectors),
            _ => return Err(err(span, format!("a bracket must be a combination of {dual}1..{dual}{n}"))),
        };
        for k in 0..n {
            let ck = v.coeff(Word::single(k));
            if !ck.is_pointwise_constant() {
                return Err(err(span, "structure constants must be constant"));
            }
            c[k][a][b] = ck.clone();
            c[k][b][a] = -ck;
        }
    }
    let mut structure = vec![Form::zero(&basis); 2 * n];
    for k in 0..n {
        let mut dk = Form::zero(&basis);
        for a in 0..n {
            for b in a + 1..n {
                if !c[k][a][b].is_zero() {
                    dk = &dk - &Form::monomial(&basis, &[a, b], c[k][a][b].clone());
                }
            }
        }
        structure[basis.conj_index(k)] = dk.conj();
        structure[k] = dk;
    }
    Frame::invariant(&basis, structure).map_err(|e| {
        let hint = if matches!(e, Error::NotAComplex(_)) { "the brackets violate the Jacobi identity" } else { "" };
        let d = err(span, e);
        if hint.is_empty() { d } else { d.with_hint(hint) }
    })
}

fn structure_frame(stem: &str, n: usize, eqs: &[(String, Ast)], span: Span) -> Result<Frame, Diagnostic> {
    let basis = Basis::complex_named(stem, n);
    let env = Env::new(basis.clone(), None);
    let mut structure: Vec<Option<Form>> = vec![None; 2 * n];
    for (lhs, rhs) in eqs {
        let i = lhs
            .strip_prefix('d')
            .and_then(|s| basis.index_of(s))
            .ok_or_else(|| err(span, format!("`{lhs}` is not d of a covector of {stem}")))?;
        if structure[i].is_some() {
            return Err(err(span, format!("`{lhs}` is given twice")));
        }
        structure[i] = Some(env.eval_form(rhs, span)?);
    }
    let mut out = vec![Form::zero(&basis); 2 * n];
    for i in 0..2 * n {
        let c = basis.conj_index(i);
        out[i] = match (&structure[i], &structure[c]) {
            (Some(f), _) => f.clone(),
            (None, Some(g)) => g.conj(),
            (None, None) => Form::zero(&basis),
        };
    }
    Frame::invariant(&basis, out).map_err(|e| err(span, e))
}

fn build(doc: &Document, fixed_params: bool) -> Result<ManifoldSpec, Diagnostic> {
    let (frame, stem, frame_span) = frame_of(doc)?;
    let basis = frame.basis().clone();
    let mut env = Env::new(basis.clone(), Some(frame.clone()));
    let mut name = None;
    let mut compact = None;
    for it in &doc.items {
        match &it.kind {
            ItemKind::Spec(n) => name = Some(n.clone()),
            ItemKind::Compact(c) => compact = Some(*c),
            ItemKind::Param(n, r) => match r {
                Reality::Real => {
                    env.params.insert(n.clone(), Var::real_parameter(n));
                }
                Reality::Complex(c) => {
                    let (t, tb) = Var::complex_parameter(n, c);
                    env.params.insert(n.clone(), t);
                    env.params.insert(c.clone(), tb);
                }
            },
            ItemKind::Function { name: f, args, reality } => {
                let vars = args
                    .iter()
                    .map(|a| {
                        frame.coord(a).cloned().ok_or_else(|| {
                            err(it.span, format!("`{a}` is not a coordinate")).with_hint("function arguments are coordinates such as x2, y2")
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                match reality {
                    Reality::Real => {
                        env.fns.insert(f.clone(), (FnSym::real(f, &vars), false));
                    }
                    Reality::Complex(c) => {
                        let sym = FnSym::complex(f, c, &vars);
                        env.fns.insert(f.clone(), (sym.clone(), false));
                        env.fns.insert(c.clone(), (sym, true));
                    }
                }
            }
            _ => {}
        }
    }

    // J from an `acs` block
    let mut acs = None;
    for it in &doc.items {
        if let ItemKind::Acs(rules) = &it.kind {
            let mut k = Matrix::zeros(basis.dim(), basis.dim());
            for (lhs, rhs) in rules {
                let c = basis.index_of(lhs).ok_or_else(|| err(it.span, format!("`{lhs}` is not a basis covector")))?;
                let image = env.eval_form(rhs, it.span)?;
                if image.degrees().iter().any(|&d| d != 1) {
                    return Err(err(it.span, format!("J {lhs} must be a combination of basis vectors")));
                }
                for a in 0..basis.dim() {
                    k.set(a, c, image.coeff(Word::single(a)));
                }
            }
            acs = Some(AlmostComplexStructure::from_matrix(&basis, k).map_err(|e| {
                err(it.span, e).with_hint("J must square to -id; check every rule")
            })?);
        }
    }

    // base coframe
    let mut base = None;
    for it in &doc.items {
        match &it.kind {
            ItemKind::Coframe { stem, entries } => {
                let mut forms = Vec::new();
                for (k, (lhs, rhs)) in entries.iter().enumerate() {
                    if *lhs != format!("{stem}{}", k + 1) {
                        return Err(err(it.span, format!("expected `{stem}{}`, found `{lhs}`", k + 1)));
                    }
                    forms.push(env.eval_form(rhs, it.span)?);
                }
                base = Some(Coframe::new(&forms, stem).map_err(|e| err(it.span, e))?);
            }
            ItemKind::CoframeFromAcs { stem } => {
                let j = acs.as_ref().ok_or_else(|| err(it.span, "`coframe from acs` needs an `acs` block"))?;
                base = Some(coframe_from_acs(j, &frame, stem).map_err(|e| err(it.span, e))?);
            }
            _ => {}
        }
    }
    let base = match base {
        Some(b) => b,
        None => match (&acs, &stem) {
            (Some(j), _) => coframe_from_acs(j, &frame, "phi").map_err(|e| err(frame_span, e))?,
            (None, Some(s)) => {
                let holo: Vec<Form> = basis.holomorphic().into_iter().map(|i| Form::covector(&basis, i)).collect();
                Coframe::new(&holo, s).map_err(|e| err(frame_span, e))?
            }
            (None, None) => {
                let n = basis.dim() / 2;
                let holo = (1..=n).map(|j| frame.dz(j)).collect::<Result<Vec<_>, _>>().map_err(|e| err(frame_span, e))?;
                Coframe::new(&holo, "phi").map_err(|e| err(frame_span, e))?
            }
        },
    };
    let has_family = doc.items.iter().any(|it| matches!(it.kind, ItemKind::Deform { .. }));
    if let Some(j) = acs.as_ref().filter(|_| !has_family) {
        if !j.is_type_10(&base.holomorphic()).map_err(|e| err(frame_span, e))? {
            return Err(err(frame_span, "the coframe is not of type (1,0) for the declared J"));
        }
    }
    env.coframes.push(base.clone());

    // deformation
    let mut family = None;
    let mut member = None;
    for it in &doc.items {
        if let ItemKind::Deform { stem, entries } = &it.kind {
            let n = base.n();
            let mut sigma = Matrix::zeros(n, n);
            for ((j, k), rhs) in entries {
                if *j == 0 || *k == 0 || *j > n || *k > n {
                    return Err(err(it.span, format!("sigma[{j}][{k}] is outside 1..{n}")));
                }
                sigma.set(j - 1, k - 1, env.eval_scalar(rhs, it.span)?);
            }
            let mut params: Vec<Var> = Vec::new();
            for v in env.params.values() {
                let used = (0..n).any(|a| (0..n).any(|b| sigma.get(a, b).depends_on(v)));
                if used {
                    for w in [v.clone(), v.conj()] {
                        if !params.contains(&w) {
                            params.push(w);
                        }
                    }
                }
            }
            params.sort_by(|a, b| a.name().cmp(b.name()));
            if fixed_params && params.is_empty() && !sigma.is_zero() {
                let cf = DeformationFamily::member(base.clone(), sigma, stem)
                    .map_err(|e| err(it.span, e).with_hint("the deformed forms are not a coframe"))?;
                env.coframes.push(cf.clone());
                member = Some(cf);
                continue;
            }
            let fam = DeformationFamily::new(base.clone(), sigma, params, stem).map_err(|e| err(it.span, e))?;
            env.coframes.push(fam.deformed().map_err(|e| err(it.span, e).with_hint("the deformed forms are not a coframe"))?);
            family = Some((fam, it.span));
        }
    }

    // metric
    let mut metric = None;
    let mut h = None;
    for it in &doc.items {
        match &it.kind {
            ItemKind::MetricIdentity => h = Some((Matrix::identity(base.n()), it.span)),
            ItemKind::Metric(entries) => {
                let n = base.n();
                let mut m = Matrix::zeros(n, n);
                for ((j, k), rhs) in entries {
                    if *j == 0 || *k == 0 || *j > n || *k > n {
                        return Err(err(it.span, format!("h[{j}][{k}] is outside 1..{n}")));
                    }
                    m.set(j - 1, k - 1, env.eval_scalar(rhs, it.span)?);
                }
                h = Some((m, it.span));
            }
            _ => {}
        }
    }
    if let Some((fam, span)) = &family {
        let (m, mspan) = h.clone().unwrap_or((Matrix::identity(base.n()), *span));
        metric = Some(MetricFamily::new(fam.clone(), m).map_err(|e| err(mspan, e))?);
    }

    // named forms
    let mut forms = Vec::new();
    for it in &doc.items {
        if let ItemKind::Form(n, rhs) = &it.kind {
            let f = env.eval_form(rhs, it.span)?;
            env.forms.insert(n.clone(), f.clone());
            forms.push((n.clone(), f));
        }
    }

    let claims = doc.claims().cloned().collect();
    Ok(ManifoldSpec {
        name: name.unwrap_or_else(|| "unnamed".into()),
        compact: compact.unwrap_or(false),
        frame,
        acs,
        base,
        family: family.map(|f| f.0),
        member,
        metric,
        hermitian: h.map(|h| h.0),
        forms,
        claims,
        document: doc.clone(),
        subs: Vec::new(),
        env,
    })
}

fn coframe_from_acs(j: &AlmostComplexStructure, frame: &Frame, stem: &str) -> crate::error::Result<Coframe> {
    let b = frame.basis();
    let n = b.dim() / 2;
    if b.is_complex() {
        return Err(Error::Invalid("`coframe from acs` needs a real coordinate basis".into()));
    }
    let alphas: Vec<Form> = (0..n).map(|i| Form::covector(b, i)).collect();
    Coframe::new(&j.coframe_from(&alphas)?, stem)
}
