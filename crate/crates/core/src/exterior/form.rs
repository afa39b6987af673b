use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, BitXor, Mul, Neg, Sub};
use std::sync::Arc;

use super::basis::{Basis, Tag};
use crate::error::{Error, Result};
use crate::symexpr::{Expr, ExprError, Var};

/// A wedge monomial `e^{i1} ∧ … ∧ e^{ik}` with `i1 < … < ik`, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Word(pub u64);

impl Word {
    pub const EMPTY: Word = Word(0);

    pub fn from_indices(idx: &[usize]) -> Option<(i32, Word)> {
        let mut bits = 0u64;
        for &i in idx {
            if bits & (1 << i) != 0 {
                return None;
            }
            bits |= 1 << i;
        }
        Some((permutation_sign(idx), Word(bits)))
    }

    pub fn single(i: usize) -> Word {
        Word(1 << i)
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut b = self.0;
        while b != 0 {
            let i = b.trailing_zeros() as usize;
            out.push(i);
            b &= b - 1;
        }
        out
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_disjoint(self, o: Word) -> bool {
        self.0 & o.0 == 0
    }

    /// Sign of `self ∧ o` relative to the sorted union; `None` if they overlap.
    pub fn merge(self, o: Word) -> Option<(i32, Word)> {
        if !self.is_disjoint(o) {
            return None;
        }
        let mut inversions = 0u32;
        let mut b = o.0;
        while b != 0 {
            let j = b.trailing_zeros();
            inversions += (self.0 >> j).count_ones();
            b &= b - 1;
        }
        Some((if inversions % 2 == 0 { 1 } else { -1 }, Word(self.0 | o.0)))
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.indices().cmp(&o.indices()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub(crate) fn permutation_sign(idx: &[usize]) -> i32 {
    let mut inversions = 0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] > idx[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(e: &Expr, sign: i32) -> Expr {
    if sign < 0 {
        -e
    } else {
        e.clone()
    }
}

/// A differential form over a fixed covector basis with symbolic coefficients.
#[derive(Clone, Debug)]
pub struct Form {
    basis: Arc<Basis>,
    terms: BTreeMap<Word, Expr>,
}

impl Form {
    pub fn zero(basis: &Arc<Basis>) -> Form {
        Form { basis: basis.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(basis: &Arc<Basis>, e: Expr) -> Form {
        let mut f = Form::zero(basis);
        f.add_term(Word::EMPTY, e);
        f
    }

    pub fn covector(basis: &Arc<Basis>, i: usize) -> Form {
        assert!(i < basis.dim());
        let mut f = Form::zero(basis);
        f.add_term(Word::single(i), Expr::one());
        f
    }

    /// The covector with the given name.
    pub fn named(basis: &Arc<Basis>, name: &str) -> Result<Form> {
        basis
            .index_of(name)
            .map(|i| Form::covector(basis, i))
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// `coef · e^{idx[0]} ∧ e^{idx[1]} ∧ …` in any index order.
    pub fn monomial(basis: &Arc<Basis>, idx: &[usize], coef: Expr) -> Form {
        let mut f = Form::zero(basis);
        if let Some((s, w)) = Word::from_indices(idx) {
            f.add_term(w, signed(&coef, s));
        }
        f
    }

    /// Wedge of named covectors, e.g. `&["phi1", "phi2", "phibar1"]`.
    pub fn wedge_of(basis: &Arc<Basis>, names: &[&str], coef: Expr) -> Result<Form> {
        let idx = names
            .iter()
            .map(|n| basis.index_of(n).ok_or_else(|| Error::UnknownName(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Form::monomial(basis, &idx, coef))
    }

    pub fn from_terms(basis: &Arc<Basis>, terms: impl IntoIterator<Item = (Word, Expr)>) -> Form {
        let mut f = Form::zero(basis);
        for (w, e) in terms {
            f.add_term(w, e);
        }
        f
    }

    pub fn add_term(&mut self, w: Word, e: Expr) {
        if e.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(c) => {
                *c = &*c + &e;
                if c.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, e);
            }
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn terms(&self) -> impl Iterator<Item = (Word, &Expr)> {
        self.terms.iter().map(|(w, e)| (*w, e))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Word) -> Expr {
        self.terms.get(&w).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of a named wedge monomial, with the sign of its ordering.
    pub fn coeff_of(&self, names: &[&str]) -> Result<Expr> {
        let idx = names
            .iter()
            .map(|n| self.basis.index_of(n).ok_or_else(|| Error::UnknownName(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(match Word::from_indices(&idx) {
            Some((s, w)) => signed(&self.coeff(w), s),
            None => Expr::zero(),
        })
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|w| w.degree()).collect()
    }

    /// Degree of a homogeneous form; the zero form has degree 0.
    pub fn degree(&self) -> Result<usize> {
        let ds = self.degrees();
        match ds.len() {
            0 => Ok(0),
            1 => Ok(*ds.iter().next().unwrap()),
            _ => Err(Error::InhomogeneousForm(ds.into_iter().collect())),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// The degree-`k` component.
    pub fn component(&self, k: usize) -> Form {
        self.filter(|w| w.degree() == k)
    }

    pub fn filter(&self, keep: impl Fn(Word) -> bool) -> Form {
        Form {
            basis: self.basis.clone(),
            terms: self.terms.iter().filter(|(w, _)| keep(**w)).map(|(w, e)| (*w, e.clone())).collect(),
        }
    }

    fn check(&self, o: &Form) -> Result<()> {
        if Basis::same(&self.basis, &o.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn checked_add(&self, o: &Form) -> Result<Form> {
        self.check(o)?;
        let mut r = self.clone();
        for (w, e) in &o.terms {
            r.add_term(*w, e.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, o: &Form) -> Result<Form> {
        self.checked_add(&-o)
    }

    pub fn scale(&self, k: &Expr) -> Form {
        if k.is_zero() {
            return Form::zero(&self.basis);
        }
        self.map_coeffs(|e| e * k)
    }

    pub fn wedge(&self, o: &Form) -> Result<Form> {
        self.check(o)?;
        let mut r = Form::zero(&self.basis);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if let Some((s, w)) = a.merge(*b) {
                    r.add_term(w, signed(&(ca * cb), s));
                }
            }
        }
        Ok(r)
    }

    /// `self^k` under the wedge product (`self^0 = 1`).
    pub fn wedge_pow(&self, k: usize) -> Form {
        let mut r = Form::scalar(&self.basis, Expr::one());
        for _ in 0..k {
            r = &r ^ self;
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        Form::from_terms(&self.basis, self.terms.iter().map(|(w, e)| (*w, f(e))))
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&Expr) -> Result<Expr, ExprError>) -> Result<Form> {
        let mut r = Form::zero(&self.basis);
        for (w, e) in &self.terms {
            r.add_term(*w, f(e)?);
        }
        Ok(r)
    }

    /// Coefficient-wise derivative in a parameter.
    pub fn diff_param(&self, t: &Var) -> Form {
        self.map_coeffs(|e| e.diff(t))
    }

    pub fn subs(&self, v: &Var, value: &Expr) -> Result<Form> {
        self.try_map_coeffs(|e| e.subs(v, value))
    }

    /// Same coefficients over another basis of the same dimension.
    pub fn rebase(&self, basis: &Arc<Basis>) -> Form {
        assert_eq!(basis.dim(), self.basis.dim());
        Form { basis: basis.clone(), terms: self.terms.clone() }
    }

    /// Complex conjugate: conjugates coefficients and swaps each covector with its partner.
    pub fn conj(&self) -> Form {
        let mut r = Form::zero(&self.basis);
        for (w, e) in &self.terms {
            let idx: Vec<usize> = w.indices().into_iter().map(|i| self.basis.conj_index(i)).collect();
            let (s, w2) = Word::from_indices(&idx).expect("conjugation is a bijection");
            r.add_term(w2, signed(&e.conj(), s));
        }
        r
    }

    pub fn is_real(&self) -> bool {
        (self - &self.conj()).is_zero()
    }

    /// Real part `(F + conj F)/2`.
    pub fn re(&self) -> Form {
        (self + &self.conj()).scale(&Expr::ratio(1, 2))
    }

    /// Type `(p, q)` of a word over a complex basis; `None` if it involves real covectors.
    pub fn word_bidegree(basis: &Basis, w: Word) -> Option<(usize, usize)> {
        let (mut p, mut q) = (0, 0);
        for i in w.indices() {
            match basis.tag(i) {
                Tag::Holomorphic => p += 1,
                Tag::Antiholomorphic => q += 1,
                Tag::Real => return None,
            }
        }
        Some((p, q))
    }

    /// The `(p, q)` component, for forms over a complex basis.
    pub fn bidegree_part(&self, p: usize, q: usize) -> Result<Form> {
        if !self.basis.is_complex() {
            return Err(Error::TypeMismatch(
                "bidegree needs a basis of (1,0)- and (0,1)-covectors; change to a coframe first".into(),
            ));
        }
        let b = self.basis.clone();
        Ok(self.filter(|w| Form::word_bidegree(&b, w) == Some((p, q))))
    }

    /// All bidegrees present, for forms over a complex basis.
    pub fn bidegrees(&self) -> Result<BTreeSet<(usize, usize)>> {
        self.terms
            .keys()
            .map(|w| {
                Form::word_bidegree(&self.basis, *w)
                    .ok_or_else(|| Error::TypeMismatch("basis has real covectors".into()))
            })
            .collect()
    }

    pub fn is_pure(&self, p: usize, q: usize) -> Result<bool> {
        Ok(self.bidegrees()?.iter().all(|&b| b == (p, q)))
    }

    /// Substitute each basis covector `e^a` by the 1-form `images[a]` (all over one target basis).
    pub fn substitute(&self, images: &[Form], target: &Arc<Basis>) -> Result<Form> {
        assert_eq!(images.len(), self.basis.dim());
        for im in images {
            if !Basis::same(im.basis(), target) {
                return Err(Error::BasisMismatch);
            }
        }
        let mut cache: BTreeMap<Word, Form> = BTreeMap::new();
        let mut r = Form::zero(target);
        for (w, e) in &self.terms {
            let img = word_image(*w, images, target, &mut cache);
            r = &r + &img.scale(e);
        }
        Ok(r)
    }

    /// Numeric coefficients at a point.
    pub fn eval(
        &self,
        at: &crate::symexpr::Assignment,
        table: &dyn crate::symexpr::FnTable,
    ) -> Result<BTreeMap<Word, num_complex::Complex64>> {
        let mut out = BTreeMap::new();
        for (w, e) in &self.terms {
            out.insert(*w, e.eval(at, table)?);
        }
        Ok(out)
    }

    /// Canonical text, e.g. `(1/2*i) * dx1^dy1 + -t * phi1^phibar2`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// `{ "dx1^dy1": "1/2*i", ... }`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (w, e) in &self.terms {
            m.insert(self.word_name(*w), serde_json::Value::String(e.to_string()));
        }
        serde_json::Value::Object(m)
    }

    pub fn word_name(&self, w: Word) -> String {
        if w == Word::EMPTY {
            return "1".into();
        }
        w.indices().iter().map(|&i| self.basis.name(i)).collect::<Vec<_>>().join("^")
    }
}

fn word_image(w: Word, images: &[Form], target: &Arc<Basis>, cache: &mut BTreeMap<Word, Form>) -> Form {
    if let Some(f) = cache.get(&w) {
        return f.clone();
    }
    let idx = w.indices();
    let f = match idx.split_last() {
        None => Form::scalar(target, Expr::one()),
        Some((&last, rest)) => {
            let head = Word::from_indices(rest).unwrap().1;
            let h = word_image(head, images, target, cache);
            &h ^ &images[last]
        }
    };
    cache.insert(w, f.clone());
    f
}

impl PartialEq for Form {
    fn eq(&self, o: &Form) -> bool {
        Basis::same(&self.basis, &o.basis) && self.terms.len() == o.terms.len() && (self - o).is_zero()
    }
}

fn coef_text(e: &Expr) -> String {
    let s = e.to_string();
    let simple = s.chars().skip(1).all(|c| c.is_alphanumeric() || c == '_' || c == '/' || c == '^')
        && !s.is_empty();
    if simple {
        s
    } else {
        format!("({s})")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, e) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *w == Word::EMPTY {
                write!(f, "{}", coef_text(e))?;
            } else if e.is_one() {
                write!(f, "{}", self.word_name(*w))?;
            } else if (-e).is_one() {
                write!(f, "-{}", self.word_name(*w))?;
            } else {
                write!(f, "{} * {}", coef_text(e), self.word_name(*w))?;
            }
        }
        Ok(())
    }
}

impl Add for &Form {
    type Output = Form;
    /// Panics on basis mismatch; see [`Form::checked_add`].
    fn add(self, o: &Form) -> Form {
        self.checked_add(o).expect("adding forms over different bases")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, o: &Form) -> Form {
        self.checked_add(&-o).expect("subtracting forms over different bases")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map_coeffs(|e| -e)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl BitXor for &Form {
    type Output = Form;
    /// Wedge product. Panics on basis mismatch; see [`Form::wedge`].
    fn bitxor(self, o: &Form) -> Form {
        self.wedge(o).expect("wedging forms over different bases")
    }
}

impl Mul<&Expr> for &Form {
    type Output = Form;
    fn mul(self, k: &Expr) -> Form {
        self.scale(k)
    }
}

macro_rules! forward_form_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Form> for Form {
            type Output = Form;
            fn $m(self, o: Form) -> Form {
                (&self).$m(&o)
            }
        }
        impl $tr<&Form> for Form {
            type Output = Form;
            fn $m(self, o: &Form) -> Form {
                (&self).$m(o)
            }
        }
        impl $tr<Form> for &Form {
            type Output = Form;
            fn $m(self, o: Form) -> Form {
                self.$m(&o)
            }
        }
    };
}

forward_form_binop!(Add, add);
forward_form_binop!(Sub, sub);
forward_form_binop!(BitXor, bitxor);

impl Mul<Expr> for Form {
    type Output = Form;
    fn mul(self, k: Expr) -> Form {
        self.scale(&k)
    }
}

impl Mul<Expr> for &Form {
    type Output = Form;
    fn mul(self, k: Expr) -> Form {
        self.scale(&k)
    }
}
