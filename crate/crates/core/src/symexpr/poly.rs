//! Multivariate polynomials over the Gaussian rationals whose indeterminates
//! are variables and (formal partial derivatives of) function applications.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::gauss::GaussRat;
use super::var::{FnSym, Var};

/// A function application `∂^{partials} F(args)`.
///
/// `partials` holds sorted argument positions, so mixed partials commute by
/// construction. `at_origin` freezes the application at the origin, where it
/// behaves as a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnApp {
    pub sym: FnSym,
    pub partials: Vec<u8>,
    pub at_origin: bool,
}

impl FnApp {
    pub fn new(sym: FnSym) -> Self {
        FnApp { sym, partials: Vec::new(), at_origin: false }
    }

    pub fn with_partial(&self, arg: usize) -> FnApp {
        let mut partials = self.partials.clone();
        partials.push(arg as u8);
        partials.sort_unstable();
        FnApp { sym: self.sym.clone(), partials, at_origin: self.at_origin }
    }

    pub fn conj(&self) -> FnApp {
        FnApp { sym: self.sym.conj(), partials: self.partials.clone(), at_origin: self.at_origin }
    }

    pub fn is_real(&self) -> bool {
        self.sym.is_real()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Fn(FnApp),
}

impl Atom {
    pub fn conj(&self) -> Atom {
        match self {
            Atom::Var(v) => Atom::Var(v.conj()),
            Atom::Fn(f) => Atom::Fn(f.conj()),
        }
    }

    /// Whether the atom varies over the manifold.
    pub fn is_pointwise(&self) -> bool {
        match self {
            Atom::Var(v) => v.is_coordinate(),
            Atom::Fn(f) => !f.at_origin,
        }
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self, Atom::Var(v) if v.is_parameter())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Fn(app) => {
                let args: Vec<&str> = app.sym.args().iter().map(|a| a.name()).collect();
                let mut s = format!("{}({})", app.sym.name(), args.join(","));
                for &p in &app.partials {
                    s = format!("diff({},{})", s, app.sym.args()[p as usize].name());
                }
                if app.at_origin {
                    s = format!("at0({s})");
                }
                f.write_str(&s)
            }
        }
    }
}

/// Sorted list of `(atom, exponent)` with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + o.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < o.0.len() && &o.0[j].0 == a {
                let oe = o.0[j].1;
                if oe > *e {
                    return None;
                }
                if oe < *e {
                    out.push((a.clone(), e - oe));
                }
                j += 1;
            } else if j < o.0.len() && o.0[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0.iter().find(|(b, _)| b == a).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect())
    }

    pub fn conj(&self) -> Monomial {
        let mut v: Vec<(Atom, u32)> = self.0.iter().map(|(a, e)| (a.conj(), *e)).collect();
        v.sort();
        Monomial(v)
    }

    /// Lexicographic monomial order, earlier atoms weigh more.
    pub fn lex_cmp(&self, o: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), o.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{a}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(pub BTreeMap<Monomial, GaussRat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Poly(m)
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::atom(a), GaussRat::one());
        Poly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.0.len() {
            0 => Some(GaussRat::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &GaussRat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &GaussRat) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            out.add_term(m1.mul(m), c1 * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn conj(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.conj(), c.conj());
        }
        out
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussRat)> {
        self.0.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    ///
    /// With a single divisor the division algorithm leaves a zero remainder
    /// exactly when `d` divides `self`, so an irreducible leading term proves
    /// non-divisibility.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading_term() {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            r = r.sub(&d.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Split off the leading coefficient: `self = c * monic`.
    pub fn monic(&self) -> (GaussRat, Poly) {
        match self.leading_term() {
            None => (GaussRat::zero(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                let inv = c.inv().unwrap();
                (c, self.scale(&inv))
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.keys().flat_map(|m| m.0.iter().map(|(a, _)| a))
    }

    pub fn is_parameter_only(&self) -> bool {
        self.atoms().all(|a| a.is_parameter())
    }

    pub fn is_pointwise_free(&self) -> bool {
        self.atoms().all(|a| !a.is_pointwise())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.0.iter().rev() {
            let (neg, c) = if c.is_real() && c.re < num_rational::BigRational::from_integer(0.into()) {
                (true, -c)
            } else {
                (false, c.clone())
            };
            let body = if m.is_one() {
                c.to_string()
            } else if c.is_one() {
                m.to_string()
            } else {
                format!("{c}*{m}")
            };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Atom {
        Atom::Var(Var::real_parameter(name))
    }

    #[test]
    fn exact_division() {
        // (1 + t^2)(x + t) / (1 + t^2)
        let t = Poly::atom(v("t"));
        let x = Poly::atom(Atom::Var(Var::real_coordinate("x")));
        let d = Poly::one().add(&t.mul(&t));
        let n = d.mul(&x.add(&t));
        assert_eq!(n.div_exact(&d), Some(x.add(&t)));
        assert_eq!(n.add(&Poly::one()).div_exact(&d), None);
    }

    #[test]
    fn lex_order_is_a_monomial_order() {
        let a = Monomial::atom(v("a"));
        let b = Monomial::atom(v("b"));
        let ab = a.mul(&b);
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(ab.lex_cmp(&a), Ordering::Greater);
        assert_eq!(ab.mul(&b).lex_cmp(&a.mul(&b)), Ordering::Greater);
        assert_eq!(a.mul(&b).lex_cmp(&b.mul(&b)), Ordering::Greater);
    }
}
