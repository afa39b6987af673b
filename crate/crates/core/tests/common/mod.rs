//! Generators and independent oracles shared by the property suites and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pklab::catalog::{builtin, BUILTINS};
use pklab::dsl::{parse, parse_expr, print, print_expr, Ast, ClaimDecl, Document, Item, ItemKind, Op, Provenance, Reality, Span};
use pklab::exterior::{Form, Frame, Matrix, Word};
use pklab::obstruct::{linear_power_preservation, standard_symplectic};
use pklab::symexpr::{Assignment, ClosureTable, Expr, FnSym, Var};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// random coefficients and forms

/// `(re, im, atom picks)` per monomial.
pub type Terms = Vec<(i64, i64, Vec<usize>)>;
/// `(word mask, coefficient)` per term.
pub type FormTerms = Vec<(u64, Terms)>;

pub fn coord_frame() -> Frame {
    Frame::real_coordinates(3)
}

/// Atoms a coefficient may use on a frame: coordinates, `t`, and `u(x2, y2)`.
pub fn atoms(frame: &Frame) -> Vec<Expr> {
    let mut out: Vec<Expr> = frame.coords().map(Expr::var).collect();
    out.push(Expr::var(&Var::real_parameter("t")));
    if let (Some(x2), Some(y2)) = (frame.coord("x2"), frame.coord("y2")) {
        out.push(Expr::func(&FnSym::real("u", &[x2.clone(), y2.clone()])));
    }
    out
}

pub fn expr_from(atoms: &[Expr], terms: &Terms) -> Expr {
    let mut e = Expr::zero();
    for (re, im, picks) in terms {
        let mut m = Expr::int(*re) + Expr::i() * Expr::int(*im);
        for &k in picks {
            m = m * atoms[k % atoms.len()].clone();
        }
        e = e + m;
    }
    e
}

/// With `degree = Some(k)` every word is trimmed or padded to degree `k`.
pub fn form_from(frame: &Frame, terms: &FormTerms, degree: Option<usize>) -> Form {
    let basis = frame.basis();
    let dim = basis.dim();
    let a = atoms(frame);
    let mut f = Form::zero(basis);
    for (mask, coef) in terms {
        let mut w = Word(mask & ((1u64 << dim) - 1));
        if let Some(k) = degree {
            let mut idx: Vec<usize> = w.indices().into_iter().take(k).collect();
            let mut next = 0;
            while idx.len() < k.min(dim) {
                if !idx.contains(&next) {
                    idx.push(next);
                }
                next += 1;
            }
            w = Word::from_indices(&idx).unwrap().1;
        }
        f = &f + &Form::from_terms(basis, [(w, expr_from(&a, coef))]);
    }
    f
}

pub fn arb_terms() -> impl Strategy<Value = Terms> {
    proptest::collection::vec((-3i64..=3, -2i64..=2, proptest::collection::vec(0usize..16, 0..3)), 0..4)
}

pub fn arb_form_terms() -> impl Strategy<Value = FormTerms> {
    proptest::collection::vec((any::<u64>(), arb_terms()), 0..4)
}

/// One frame of each kind: coordinates, the Iwasawa coframe induced on
/// coordinates, and the invariant SL(2,ℂ) and Heisenberg frames.
pub fn frames() -> Vec<(&'static str, Frame)> {
    let iw = builtin("iwasawa").unwrap();
    vec![
        ("coordinates", coord_frame()),
        ("iwasawa coframe", iw.frame_on(&iw.base).unwrap()),
        ("sl2c", builtin("sl2c").unwrap().frame),
        ("heisenberg4", builtin("heisenberg4").unwrap().frame),
    ]
}

fn sign(deg: usize) -> Expr {
    if deg % 2 == 0 {
        Expr::one()
    } else {
        -Expr::one()
    }
}

// engine properties

pub fn check_ring(a: &Terms, b: &Terms, c: &Terms) -> Check {
    let at = atoms(&coord_frame());
    let (a, b, c) = (expr_from(&at, a), expr_from(&at, b), expr_from(&at, c));
    ensure!(&a + &b == &b + &a, "a + b != b + a");
    ensure!(&a * &b == &b * &a, "ab != ba");
    ensure!(&(&a + &b) + &c == &a + &(&b + &c), "+ not associative");
    ensure!(&(&a * &b) * &c == &a * &(&b * &c), "* not associative");
    ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "not distributive");
    ensure!((&a - &a).is_zero(), "a - a != 0");
    ensure!(&a * &Expr::one() == a, "a*1 != a");
    ensure!(a.conj().conj() == a, "conj is not an involution");
    ensure!((&a * &b).conj() == &a.conj() * &b.conj(), "conj not multiplicative");
    ensure!(&a.re() + &(Expr::i() * a.im()) == a, "re + i im != a");
    let t = Var::real_parameter("t");
    let den = Expr::one() + Expr::var(&t) * Expr::var(&t);
    ensure!(&a.checked_div(&den).unwrap() * &den == a, "(a/q)q != a");
    for v in coord_frame().coords() {
        ensure!((&a * &b).diff(v) == &(&a.diff(v) * &b) + &(&a * &b.diff(v)), "product rule fails for {}", v.name());
    }
    Ok(())
}

pub fn check_d2(terms: &FormTerms) -> Check {
    for (name, fr) in frames() {
        let f = form_from(&fr, terms, None);
        let dd = fr.d(&fr.d(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(dd.is_zero(), "{name}: d²({f}) = {dd}");
    }
    Ok(())
}

pub fn check_leibniz(ta: &FormTerms, tb: &FormTerms, k: usize) -> Check {
    for (name, fr) in frames() {
        let a = form_from(&fr, ta, Some(k));
        let b = form_from(&fr, tb, None);
        let lhs = fr.d(&a.wedge(&b).unwrap()).unwrap();
        let rhs = &fr.d(&a).unwrap().wedge(&b).unwrap() + &a.wedge(&fr.d(&b).unwrap()).unwrap().scale(&sign(k));
        ensure!(lhs == rhs, "{name}: d(a^b) != da^b + (-1)^k a^db for a = {a}, b = {b}");
    }
    Ok(())
}

pub fn check_invariant_projections(terms: &FormTerms) -> Check {
    let fr = builtin("sl2c").unwrap().frame;
    let f = form_from(&fr, terms, None);
    let mut sum = Form::zero(fr.basis());
    for p in 0..=3 {
        for q in 0..=3 {
            let part = f.bidegree_part(p, q).unwrap();
            ensure!(part.bidegree_part(p, q).unwrap() == part, "not idempotent at ({p},{q})");
            if !part.is_zero() {
                ensure!(part.is_pure(p, q).unwrap(), "({p},{q}) part is not pure");
                ensure!(part.bidegree_part(q, p + 1).unwrap().is_zero(), "({p},{q}) part leaks");
            }
            sum = &sum + &part;
        }
    }
    ensure!(sum == f, "parts do not sum to {f}");
    Ok(())
}

/// Projections for the coordinate-dependent coframe of the ℂ⁴ structure.
pub fn check_coframe_projections(terms: &FormTerms) -> Check {
    let spec = builtin("c4_family").unwrap();
    let cf = &spec.base;
    let f = form_from(&spec.frame, terms, None);
    let mut sum = Form::zero(spec.frame.basis());
    for p in 0..=4 {
        for q in 0..=4 {
            let part = cf.project(&f, p, q).unwrap();
            ensure!(part.bidegree_part(p, q).unwrap() == part, "not idempotent at ({p},{q})");
            let back = cf.to_parent(&part).unwrap();
            ensure!(cf.project(&back, p, q).unwrap() == part, "projection does not fix its image at ({p},{q})");
            for (p2, q2) in [(p + 1, q), (p, q + 1)] {
                ensure!(cf.project(&back, p2, q2).unwrap().is_zero(), "({p},{q}) part has a ({p2},{q2}) component");
            }
            sum = &sum + &back;
        }
    }
    ensure!(sum == f, "parts do not sum to {f}");
    Ok(())
}

// finite-difference oracle

pub fn table() -> ClosureTable {
    fn sin_deriv(k: usize, x: Complex64) -> Complex64 {
        match k % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        }
    }
    let mut t = ClosureTable::new();
    // u = sin(a) e^b
    t.insert("u", |p, a| {
        let na = p.iter().filter(|&&k| k == 0).count();
        sin_deriv(na, a[0]) * a[1].exp()
    });
    // v = sin(a + 2b + 1/2)
    t.insert("v", |p, a| {
        let nb = p.iter().filter(|&&k| k == 1).count() as i32;
        sin_deriv(p.len(), a[0] + 2.0 * a[1] + 0.5) * 2f64.powi(nb)
    });
    // g = e^a sin(b)
    t.insert("g", |p, a| {
        let nb = p.iter().filter(|&&k| k == 1).count();
        a[0].exp() * sin_deriv(nb, a[1])
    });
    t
}

/// `(dα)_K = Σ_s (-1)^s ∂_{k_s} α_{K∖k_s}` with central differences.
fn fd_d(f: &Form, frame: &Frame, at: &Assignment, table: &ClosureTable) -> BTreeMap<Word, Complex64> {
    let coords: Vec<Var> = frame.coords().cloned().collect();
    let h = 1e-5;
    let shifted = |a: usize, s: f64| {
        let mut p = at.clone();
        p.set(&coords[a], at.get(&coords[a]).unwrap() + s);
        f.eval(&p, table).unwrap()
    };
    let grads: Vec<_> = (0..coords.len()).map(|a| (shifted(a, h), shifted(a, -h))).collect();
    let mut out: BTreeMap<Word, Complex64> = BTreeMap::new();
    for (w, _) in f.terms() {
        for (a, (plus, minus)) in grads.iter().enumerate() {
            if w.contains(a) {
                continue;
            }
            let deriv = (plus.get(&w).copied().unwrap_or_default() - minus.get(&w).copied().unwrap_or_default()) / (2.0 * h);
            let mut idx = vec![a];
            idx.extend(w.indices());
            let (s, k) = Word::from_indices(&idx).unwrap();
            *out.entry(k).or_default() += deriv * s as f64;
        }
    }
    out
}

/// Compares symbolic `d` with the oracle at 10 random points; returns the
/// worst relative error.
pub fn check_fd(name: &str, f: &Form, frame: &Frame, params: &[(Var, f64)], seed: u64) -> Result<f64, String> {
    let table = table();
    let df = frame.d(f).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for _ in 0..10 {
        let mut at = Assignment::new();
        for v in frame.coords() {
            at.set(v, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        }
        for (t, x) in params {
            at.set(t, Complex64::new(*x, 0.0));
        }
        let exact = df.eval(&at, &table).map_err(|e| e.to_string())?;
        let fd = fd_d(f, frame, &at, &table);
        let scale = exact.values().chain(fd.values()).map(|z| z.norm()).fold(1.0, f64::max);
        let words: std::collections::BTreeSet<Word> = exact.keys().chain(fd.keys()).copied().collect();
        for w in words {
            let (e, z) = (exact.get(&w).copied().unwrap_or_default(), fd.get(&w).copied().unwrap_or_default());
            let err = (e - z).norm() / scale;
            worst = worst.max(err);
            ensure!(err <= 1e-6, "{name}: word {w:?}: exact {e}, finite differences {z}");
        }
    }
    Ok(worst)
}

/// Forms on the coordinate-frame examples, with parameter values.
pub fn fd_cases() -> Vec<(String, Form, Frame, Vec<(Var, f64)>)> {
    let t = Var::real_parameter("t");
    let tau = Var::real_parameter("tau");
    let torus = builtin("torus6").unwrap();
    let iw = builtin("iwasawa").unwrap();
    let c4 = builtin("c4_family").unwrap();
    vec![
        ("torus6 omega_t^2".into(), torus.form("omega").unwrap().wedge_pow(2), torus.frame.clone(), vec![(t.clone(), 0.3)]),
        ("torus6 phit3^phitbar1".into(), torus.eval_text("phit3^phitbar1").unwrap(), torus.frame.clone(), vec![(t.clone(), -0.7)]),
        ("iwasawa omega".into(), iw.form("omega").unwrap().clone(), iw.frame.clone(), vec![]),
        ("iwasawa phit3^phit1".into(), iw.eval_text("phit3^phit1").unwrap(), iw.frame.clone(), vec![(t, 0.4)]),
        ("c4 Omegatau".into(), c4.form("Omegatau").unwrap().clone(), c4.frame.clone(), vec![(tau, 0.2)]),
    ]
}

pub fn random_form_terms(rng: &mut ChaCha8Rng) -> FormTerms {
    (0..3)
        .map(|_| {
            let coef = (0..3)
                .map(|_| (rng.gen_range(-3..=3), rng.gen_range(-2..=2), (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..16)).collect()))
                .collect();
            (rng.gen(), coef)
        })
        .collect()
}

// linear oracle

type Q = BigRational;

fn rational(m: &Matrix) -> Vec<Vec<Q>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c).as_rational().expect("rational entry")).collect()).collect()
}

/// Pfaffian by expansion along the first row.
fn pfaffian(a: &[Vec<Q>], idx: &[usize]) -> Q {
    if idx.is_empty() {
        return Q::one();
    }
    let first = idx[0];
    let mut total = Q::zero();
    for k in 1..idx.len() {
        let entry = &a[first][idx[k]];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|&(m, _)| m != k - 1).map(|(_, &i)| i).collect();
        let term = entry * pfaffian(a, &rest);
        if k % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if d < k {
        return vec![];
    }
    let mut out = subsets(d - 1, k);
    for mut s in subsets(d - 1, k - 1) {
        s.push(d - 1);
        out.push(s);
    }
    out
}

/// The coefficient of `e^I` in `ω^p` is `p!·Pf(W_II)`, so `ω^p` is preserved
/// iff every principal `2p`-Pfaffian agrees.
pub fn oracle_preserves(j: &Matrix, p: usize) -> bool {
    let w = standard_symplectic(j.rows() / 2);
    let pulled = rational(&j.transpose().mul(&w).mul(j));
    let w = rational(&w);
    subsets(j.rows(), 2 * p).iter().all(|s| pfaffian(&pulled, s) == pfaffian(&w, s))
}

pub fn oracle_sign(j: &Matrix) -> Option<i8> {
    let w = standard_symplectic(j.rows() / 2);
    let pulled = j.transpose().mul(&w).mul(j);
    if pulled == w {
        Some(1)
    } else if pulled == w.scale(&-Expr::one()) {
        Some(-1)
    } else {
        None
    }
}

/// `J x1 = x2, J x2 = -x1, J y1 = -y2, J y2 = y1` on each 4-block, so
/// `J^*ω = -ω`; `n` must be even.
pub fn anti_symplectic(n: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for b in (0..n).step_by(2) {
        let (x1, x2, y1, y2) = (b, b + 1, n + b, n + b + 1);
        j.set(x2, x1, Expr::one());
        j.set(x1, x2, -Expr::one());
        j.set(y2, y1, -Expr::one());
        j.set(y1, y2, Expr::one());
    }
    j
}

/// Engine and oracle agree for `1 ≤ p ≤ n-1`, and a preserved power
/// implies `J^*ω = ±ω`. Returns `(p, preserves ω^p, sign)` rows.
pub fn check_linear(j: &Matrix, n: usize, label: &str) -> Result<Vec<(usize, bool, Option<i8>)>, String> {
    let w = standard_symplectic(n);
    let mut rows = Vec::new();
    for p in 1..n {
        let r = linear_power_preservation(j, &w, p).map_err(|e| e.to_string())?;
        ensure!(r.preserves_omega_p == oracle_preserves(j, p), "{label}, p = {p}: engine and Pfaffian oracle disagree");
        ensure!(r.preserves_omega_sign == oracle_sign(j), "{label}: sign disagrees with the oracle");
        ensure!(!r.preserves_omega_p || r.preserves_omega_sign.is_some(), "{label}: ω^{p} preserved without ±ω");
        rows.push((p, r.preserves_omega_p, r.preserves_omega_sign));
    }
    Ok(rows)
}

// fuzzed documents

const IDENTS: [&str; 8] = ["x1", "y2", "t", "tbar", "dz1", "phibar2", "Omega", "u"];

pub fn arb_expr() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        (0u32..50).prop_map(|n| Ast::Num(n.into())),
        proptest::sample::select(&IDENTS[..]).prop_map(|s| Ast::Ident(s.to_string(), Span::default())),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
            (
                proptest::sample::select(&[Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Caret][..]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Ast::Bin(op, Box::new(a), Box::new(b))),
            (proptest::sample::select(&["d", "conj", "re", "im"][..]), inner.clone())
                .prop_map(|(f, a)| Ast::Call(f.to_string(), vec![a], Span::default())),
            (inner.clone(), proptest::sample::select(&IDENTS[..2]))
                .prop_map(|(a, v)| Ast::Call("diff".into(), vec![a, Ast::Ident(v.to_string(), Span::default())], Span::default())),
        ]
    })
}

fn arb_item(k: usize) -> impl Strategy<Value = ItemKind> {
    let e = arb_expr;
    prop_oneof![
        "[a-z ]{0,12}".prop_map(|s| ItemKind::Comment(s.trim().to_string())),
        Just(ItemKind::Blank),
        (1usize..5).prop_map(ItemKind::Coordinates),
        any::<bool>().prop_map(ItemKind::Compact),
        Just(ItemKind::Param(format!("p{k}"), Reality::Real)),
        Just(ItemKind::Param(format!("q{k}"), Reality::Complex(format!("qbar{k}")))),
        Just(ItemKind::Function { name: format!("g{k}"), args: vec!["x2".into(), "y2".into()], reality: Reality::Real }),
        proptest::collection::vec(e(), 0..3).prop_map(|v| ItemKind::Coframe {
            stem: "phi".into(),
            entries: v.into_iter().enumerate().map(|(j, a)| (format!("phi{}", j + 1), a)).collect()
        }),
        proptest::collection::vec(((1usize..4, 1usize..4), e()), 0..3)
            .prop_map(|entries| ItemKind::Deform { stem: "phit".into(), entries }),
        proptest::collection::vec(((1usize..4, 1usize..4), e()), 1..3).prop_map(ItemKind::Metric),
        Just(ItemKind::MetricIdentity),
        Just(ItemKind::CoframeFromAcs { stem: "Phi".into() }),
        proptest::collection::vec(e(), 1..3).prop_map(|v| ItemKind::Acs(
            v.into_iter().enumerate().map(|(j, a)| (format!("dx{}", j + 1), a)).collect()
        )),
        (1usize..4, proptest::collection::vec(e(), 1..3)).prop_map(|(n, v)| ItemKind::Structure {
            stem: "psi".into(),
            n,
            eqs: v.into_iter().enumerate().map(|(j, a)| (format!("dpsi{}", j + 1), a)).collect()
        }),
        proptest::collection::vec(e(), 1..3).prop_map(|v| ItemKind::Algebra {
            stem: "e".into(),
            n: 3,
            dual: "E".into(),
            brackets: v.into_iter().enumerate().map(|(j, a)| ((format!("E{}", j + 1), "E3".to_string()), a)).collect()
        }),
        e().prop_map(move |a| ItemKind::Form(format!("F{k}"), a)),
        (
            proptest::collection::vec(e(), 0..3),
            proptest::collection::vec(e(), 0..2),
            0u8..3,
            "[a-z ]{0,10}"
        )
            .prop_map(move |(args, subs, pk, text)| ItemKind::Claim(ClaimDecl {
                id: format!("c{k}"),
                kind: "equal".into(),
                args,
                subs: subs.into_iter().enumerate().map(|(j, a)| (format!("s{j}"), a)).collect(),
                provenance: match pk {
                    0 => Provenance::Stated(text),
                    1 => Provenance::Derived(text),
                    _ => Provenance::Trivial(text),
                },
            })),
    ]
}

pub fn arb_document() -> impl Strategy<Value = Document> {
    (1usize..12)
        .prop_flat_map(|n| (0..n).map(arb_item).collect::<Vec<_>>())
        .prop_map(|kinds| {
            let mut items: Vec<Item> = Vec::new();
            for kind in kinds {
                // the parser folds blank runs and drops leading ones
                if kind == ItemKind::Blank && items.last().is_none_or(|i| i.kind == ItemKind::Blank) {
                    continue;
                }
                items.push(Item { span: Span::default(), kind });
            }
            if items.last().is_some_and(|i| i.kind == ItemKind::Blank) {
                items.pop();
            }
            Document { items }
        })
}

pub fn check_document_round_trip(doc: &Document) -> Check {
    let text = print(doc);
    let back = parse(&text).map_err(|d| format!("{text}\n{d:?}"))?;
    ensure!(&back == doc, "reparse differs:\n{text}");
    ensure!(print(&back) == text, "print is not stable:\n{text}");
    Ok(())
}

pub fn check_expr_round_trip(e: &Ast) -> Check {
    let text = print_expr(e);
    let back = parse_expr(&text).map_err(|d| format!("{text}\n{d:?}"))?;
    ensure!(&back == e, "reparse differs: {text}");
    Ok(())
}

/// Every shipped description prints back to its own source.
pub fn check_catalog_round_trip() -> Check {
    for (name, text) in BUILTINS {
        let doc = parse(text).map_err(|d| format!("{name}: {d:?}"))?;
        ensure!(print(&doc) == text, "{name} does not print canonically");
        ensure!(parse(&print(&doc)).ok().as_ref() == Some(&doc), "{name} does not reparse");
    }
    Ok(())
}
