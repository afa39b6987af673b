//! Univariate rational polynomials with Sturm-sequence root isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::symexpr::{Atom, Expr, Poly, Var};

/// Coefficients from the constant term upwards, without trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly(pub Vec<BigRational>);

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> UPoly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    /// Read a real polynomial in `v` alone; `None` if other atoms or
    /// non-real coefficients occur.
    pub fn from_poly(p: &Poly, v: &Var) -> Option<UPoly> {
        let mut c: Vec<BigRational> = Vec::new();
        for (m, k) in &p.0 {
            if !k.is_real() {
                return None;
            }
            let mut deg = 0usize;
            for (a, e) in &m.0 {
                match a {
                    Atom::Var(w) if w == v => deg = *e as usize,
                    _ => return None,
                }
            }
            if c.len() <= deg {
                c.resize(deg + 1, BigRational::zero());
            }
            c[deg] += &k.re;
        }
        Some(UPoly::new(c))
    }

    /// Numerator and denominator factors of an expression, each read as a
    /// polynomial in `v`.
    pub fn factors_of(e: &Expr, v: &Var) -> Option<Vec<UPoly>> {
        let mut out = vec![UPoly::from_poly(e.numerator(), v)?];
        for (f, _) in e.denominator_factors() {
            out.push(UPoly::from_poly(f, v)?);
        }
        Some(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn deriv(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn rem(&self, d: &UPoly) -> UPoly {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("division by zero polynomial");
        while r.len() >= d.0.len() && !r.is_empty() {
            let shift = r.len() - d.0.len();
            let q = r.last().unwrap() / dl;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UPoly::new(r)
    }

    fn sturm(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.deriv()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            seq.push(UPoly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        seq
    }

    /// Cauchy bound on the absolute value of the real roots, rounded up to a
    /// power of two so that bisection visits dyadic rationals.
    fn root_bound(&self) -> BigRational {
        let lead = self.0.last().unwrap().abs();
        let m = self.0.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        let bound = m + BigRational::one();
        let mut p2 = BigRational::one();
        while p2 < bound {
            p2 = p2 * BigRational::from_integer(BigInt::from(2));
        }
        p2
    }

    /// Isolating intervals `(a, b]` for the distinct real roots, each of
    /// width below `eps`. Exact rational roots come back as `a == b`.
    pub fn real_roots(&self, eps: &BigRational) -> Vec<(BigRational, BigRational)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let seq = self.sturm();
        let count = |x: &BigRational| {
            let mut last = 0i8;
            let mut changes = 0;
            for p in &seq {
                let v = p.eval(x);
                let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
                if s != 0 {
                    if last != 0 && s != last {
                        changes += 1;
                    }
                    last = s;
                }
            }
            changes
        };
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = count(&lo) - count(&hi);
            if n == 0 {
                continue;
            }
            if self.eval(&hi).is_zero() && n == 1 {
                out.push((hi.clone(), hi));
                continue;
            }
            if n == 1 && &hi - &lo < *eps {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// A parameter interval around a center on which a family of conditions
/// holds. `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ParamRange {
    pub param: String,
    #[serde(serialize_with = "ser_opt_rat")]
    pub lower: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rat")]
    pub upper: Option<BigRational>,
    /// Whether the bounds are the exact roots rather than inner
    /// approximations.
    pub exact: bool,
}

fn ser_opt_rat<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl ParamRange {
    pub fn contains(&self, x: &BigRational) -> bool {
        self.lower.as_ref().is_none_or(|l| l < x) && self.upper.as_ref().is_none_or(|u| x < u)
    }
}

impl std::fmt::Display for ParamRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lo = self.lower.as_ref().map_or("-inf".to_string(), |r| r.to_string());
        let hi = self.upper.as_ref().map_or("inf".to_string(), |r| r.to_string());
        write!(f, "{} in ({lo}, {hi})", self.param)
    }
}

/// The largest open interval around `center` free of roots of every
/// polynomial, with rational inner bounds.
pub fn root_free_interval(polys: &[UPoly], param: &Var, center: &BigRational) -> ParamRange {
    let eps = BigRational::new(BigInt::one(), BigInt::from(1u64 << 30));
    let mut lower: Option<(BigRational, bool)> = None;
    let mut upper: Option<(BigRational, bool)> = None;
    for p in polys {
        for (a, b) in p.real_roots(&eps) {
            let exact = a == b;
            if &b <= center && !(exact && &a == center) {
                // the root lies in (a, b], so b bounds the interval from inside
                let bound = b.clone();
                if lower.as_ref().is_none_or(|(l, _)| bound > *l) {
                    lower = Some((bound, exact));
                }
            } else if &a >= center {
                let bound = a.clone();
                if upper.as_ref().is_none_or(|(u, _)| bound < *u) {
                    upper = Some((bound, exact));
                }
            } else {
                // isolating interval straddles the center: shrink to the center
                lower = Some((center.clone(), exact));
                upper = Some((center.clone(), exact));
            }
        }
    }
    let exact = lower.as_ref().is_none_or(|l| l.1) && upper.as_ref().is_none_or(|u| u.1);
    ParamRange { param: param.name().to_string(), lower: lower.map(|l| l.0), upper: upper.map(|u| u.0), exact }
}
