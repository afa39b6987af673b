//! Symbolic scalars: polynomials in coordinates, parameters, and function
//! applications, divided by a product of parameter-only polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::gauss::GaussRat;
use super::poly::{Atom, FnApp, Monomial, Poly};
use super::var::{FnSym, Var};
use super::ExprError;

/// Canonical form: `num / Π den_k^{e_k}` where every `den_k` is a monic,
/// non-constant polynomial in parameters only, and no `den_k` divides `num`.
#[derive(Clone, Debug, Default)]
pub struct Expr {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

/// Insert `f^k` into a factor list, splitting against factors already present.
fn merge_factor(list: &mut Vec<(Poly, u32)>, f: Poly, k: u32) {
    if k == 0 || f.as_constant().is_some() {
        return;
    }
    debug_assert!(f.leading_term().is_some_and(|(_, c)| c.is_one()));
    let mut f = f;
    let mut i = 0;
    while i < list.len() {
        if list[i].0 == f {
            list[i].1 += k;
            list.sort();
            return;
        }
        if let Some(q) = f.div_exact(&list[i].0) {
            list[i].1 += k;
            f = q.monic().1;
            if f.as_constant().is_some() {
                list.sort();
                return;
            }
            i = 0;
            continue;
        }
        if let Some(q) = list[i].0.div_exact(&f) {
            let e = list[i].1;
            list.remove(i);
            merge_factor(list, q, e);
            merge_factor(list, f, k + e);
            return;
        }
        i += 1;
    }
    list.push((f, k));
    list.sort();
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::constant(GaussRat::one())
    }

    pub fn i() -> Expr {
        Expr::constant(GaussRat::i())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(GaussRat::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(GaussRat::from_ratio(n, d))
    }

    pub fn constant(c: GaussRat) -> Expr {
        Expr { num: Poly::constant(c), den: Vec::new() }
    }

    pub fn var(v: &Var) -> Expr {
        Expr { num: Poly::atom(Atom::Var(v.clone())), den: Vec::new() }
    }

    pub fn func(f: &FnSym) -> Expr {
        Expr { num: Poly::atom(Atom::Fn(FnApp::new(f.clone()))), den: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr { num: p, den: Vec::new() }
    }

    fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> Expr {
        let mut e = Expr { num, den };
        e.reduce();
        e
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value when the expression is a Gaussian-rational constant.
    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_constant().filter(|c| c.is_real()).map(|c| c.re)
    }

    /// All atoms appearing in the numerator or denominator.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .num
            .atoms()
            .chain(self.den.iter().flat_map(|(f, _)| f.atoms()))
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for a in self.atoms() {
            match a {
                Atom::Var(v) => out.push(v),
                Atom::Fn(app) => {
                    if !app.at_origin {
                        out.extend(app.sym.args().iter().cloned())
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Whether the value is the same at every point of the manifold.
    pub fn is_pointwise_constant(&self) -> bool {
        self.num.is_pointwise_free()
    }

    pub fn is_parameter_only(&self) -> bool {
        self.num.is_parameter_only()
    }

    pub fn depends_on(&self, v: &Var) -> bool {
        self.vars().contains(v)
    }

    pub fn pow(&self, k: u32) -> Expr {
        let mut acc = Expr::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Division by an expression whose numerator involves parameters only.
    pub fn checked_div(&self, d: &Expr) -> Result<Expr, ExprError> {
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if !d.num.is_parameter_only() {
            return Err(ExprError::CoordinateDenominator(d.to_string()));
        }
        let (c, m) = d.num.monic();
        let cinv = c.inv().ok_or(ExprError::DivisionByZero)?;
        let mut num = self.num.scale(&cinv);
        for (f, k) in &d.den {
            num = num.mul(&f.pow(*k));
        }
        let mut den = self.den.clone();
        merge_factor(&mut den, m, 1);
        Ok(Expr::from_parts(num, den))
    }

    pub fn conj(&self) -> Expr {
        let mut num = self.num.conj();
        let mut den = Vec::new();
        for (f, k) in &self.den {
            let (c, m) = f.conj().monic();
            num = num.scale(&c.pow(*k).inv().unwrap());
            merge_factor(&mut den, m, *k);
        }
        Expr::from_parts(num, den)
    }

    /// `(self + conj(self)) / 2`.
    pub fn re(&self) -> Expr {
        (self + &self.conj()) * Expr::ratio(1, 2)
    }

    /// `(self - conj(self)) / 2i`.
    pub fn im(&self) -> Expr {
        (self - &self.conj()) * Expr::constant(GaussRat::from_ratio(-1, 2)) * Expr::i()
    }

    pub fn is_real(&self) -> bool {
        (self - &self.conj()).is_zero()
    }

    fn diff_poly(p: &Poly, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &p.0 {
            for (idx, (a, e)) in m.0.iter().enumerate() {
                let da: Poly = match a {
                    Atom::Var(w) => {
                        if w == v {
                            Poly::one()
                        } else {
                            continue;
                        }
                    }
                    Atom::Fn(app) => {
                        if app.at_origin {
                            continue;
                        }
                        let mut acc = Poly::zero();
                        for pos in app.sym.arg_index(v) {
                            acc = acc.add(&Poly::atom(Atom::Fn(app.with_partial(pos))));
                        }
                        if acc.is_zero() {
                            continue;
                        }
                        acc
                    }
                };
                let mut rest = m.0.clone();
                if *e == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 -= 1;
                }
                let k = &GaussRat::from_int(*e as i64) * c;
                out = out.add(&da.mul_term(&Monomial(rest), &k));
            }
        }
        out
    }

    /// Partial derivative; conjugate variables are independent.
    pub fn diff(&self, v: &Var) -> Expr {
        let dn = Expr::diff_poly(&self.num, v);
        let mut result = Expr::from_parts(dn, self.den.clone());
        if v.is_parameter() {
            for (i, (f, k)) in self.den.iter().enumerate() {
                let df = Expr::diff_poly(f, v);
                if df.is_zero() {
                    continue;
                }
                let mut den = self.den.clone();
                den[i].1 += 1;
                let term = Expr::from_parts(
                    self.num.mul(&df).scale(&GaussRat::from_int(*k as i64)),
                    den,
                );
                result = &result - &term;
            }
        }
        result
    }

    /// Substitute `v := value` throughout, including denominators.
    ///
    /// Function applications are left untouched.
    pub fn subs(&self, v: &Var, value: &Expr) -> Result<Expr, ExprError> {
        let num = Expr::subs_poly(&self.num, v, value);
        let mut out = num;
        for (f, k) in &self.den {
            let fd = Expr::subs_poly(f, v, value);
            if fd.is_zero() {
                return Err(ExprError::DivisionByZero);
            }
            for _ in 0..*k {
                out = out.checked_div(&fd)?;
            }
        }
        Ok(out)
    }

    fn subs_poly(p: &Poly, v: &Var, value: &Expr) -> Expr {
        let atom = Atom::Var(v.clone());
        let mut out = Expr::zero();
        for (m, c) in &p.0 {
            let e = m.exponent(&atom);
            let mut rest = Poly::zero();
            rest.add_term(m.without(&atom), c.clone());
            let rest = Expr::from_poly(rest);
            out = &out + &(&rest * &value.pow(e));
        }
        out
    }

    /// Set every coordinate to zero and freeze function applications there.
    pub fn at_origin(&self) -> Expr {
        let mut num = Poly::zero();
        'terms: for (m, c) in &self.num.0 {
            let mut out = Vec::new();
            for (a, e) in &m.0 {
                match a {
                    Atom::Var(v) if v.is_coordinate() => continue 'terms,
                    Atom::Fn(app) => {
                        let mut app = app.clone();
                        app.at_origin = true;
                        out.push((Atom::Fn(app), *e));
                    }
                    _ => out.push((a.clone(), *e)),
                }
            }
            out.sort();
            num.add_term(Monomial(out), c.clone());
        }
        Expr::from_parts(num, self.den.clone())
    }

    /// Replace every application of `f` (and its partials) by `value` and its
    /// partial derivatives.
    pub fn subs_fn(&self, f: &FnSym, value: &Expr) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (m, c) in &self.num.0 {
            let mut term = Expr::constant(c.clone());
            for (a, e) in &m.0 {
                let base = match a {
                    Atom::Fn(app) if &app.sym == f => {
                        let mut d = value.clone();
                        for &p in &app.partials {
                            d = d.diff(&f.args()[p as usize]);
                        }
                        if app.at_origin {
                            d = d.at_origin();
                        }
                        d
                    }
                    _ => Expr::from_poly(Poly::atom(a.clone())),
                };
                term = &term * &base.pow(*e);
            }
            out = &out + &term;
        }
        let mut d = Expr::one();
        for (fac, k) in &self.den {
            d = &d * &Expr::from_poly(fac.pow(*k));
        }
        out.checked_div(&d)
    }
}

impl PartialEq for Expr {
    fn eq(&self, o: &Expr) -> bool {
        if self.den == o.den {
            self.num == o.num
        } else {
            (self - o).is_zero()
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(p, k)| if *k == 1 { format!("({p})") } else { format!("({p})^{k}") })
            .collect();
        if let [(p, 1)] = self.den.as_slice() {
            return write!(f, "({})/({p})", self.num);
        }
        write!(f, "({})/({})", self.num, den.join("*"))
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        if self.den == o.den {
            return Expr::from_parts(self.num.add(&o.num), self.den.clone());
        }
        // shared factors would only be cancelled again by `reduce`; strip them first
        let mut only_a = self.den.clone();
        let mut only_b = o.den.clone();
        let mut common: Vec<(Poly, u32)> = Vec::new();
        for (f, kb) in only_b.iter_mut() {
            if let Some((_, ka)) = only_a.iter_mut().find(|(g, _)| g == f) {
                let m = (*ka).min(*kb);
                *ka -= m;
                *kb -= m;
                common.push((f.clone(), m));
            }
        }
        only_a.retain(|(_, k)| *k > 0);
        only_b.retain(|(_, k)| *k > 0);
        let prod = |l: &[(Poly, u32)]| l.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)));
        let num = self.num.mul(&prod(&only_b)).add(&o.num.mul(&prod(&only_a)));
        let mut den = common;
        for (f, k) in only_a.into_iter().chain(only_b) {
            merge_factor(&mut den, f, k);
        }
        Expr::from_parts(num, den)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        self + &(-o)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            merge_factor(&mut den, f.clone(), *k);
        }
        Expr::from_parts(self.num.mul(&o.num), den)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                (&self).$m(&o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                (&self).$m(o)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                self.$m(&o)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<GaussRat> for Expr {
    fn from(c: GaussRat) -> Expr {
        Expr::constant(c)
    }
}

impl From<&Var> for Expr {
    fn from(v: &Var) -> Expr {
        Expr::var(v)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}
