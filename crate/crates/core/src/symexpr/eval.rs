//! Numeric evaluation, the backend for finite-difference oracles.

use std::collections::HashMap;

use num_complex::Complex64;

use super::poly::{Atom, FnApp, Poly};
use super::var::{FnSym, Var};
use super::{Expr, ExprError};

/// Numeric values for opaque function symbols and their formal partials.
pub trait FnTable {
    /// Value of `∂^{partials} sym` at `args`; `partials` are sorted argument
    /// positions. `None` when the table does not know the symbol.
    fn eval(&self, sym: &FnSym, partials: &[u8], args: &[Complex64]) -> Option<Complex64>;
}

/// A table with no functions.
pub struct NoFunctions;

impl FnTable for NoFunctions {
    fn eval(&self, _: &FnSym, _: &[u8], _: &[Complex64]) -> Option<Complex64> {
        None
    }
}

type NumFn = Box<dyn Fn(&[u8], &[Complex64]) -> Complex64 + Send + Sync>;

/// Function table backed by closures keyed on the symbol name.
#[derive(Default)]
pub struct ClosureTable {
    fns: HashMap<String, NumFn>,
}

impl ClosureTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&[u8], &[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        self.fns.insert(name.to_string(), Box::new(f));
    }
}

impl FnTable for ClosureTable {
    fn eval(&self, sym: &FnSym, partials: &[u8], args: &[Complex64]) -> Option<Complex64> {
        self.fns.get(sym.name()).map(|f| f(partials, args))
    }
}

/// Assignment of numeric values to variables.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    values: HashMap<Var, Complex64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: &Var, value: Complex64) -> &mut Self {
        self.values.insert(v.clone(), value);
        self
    }

    /// Assign a complex variable and its partner together.
    pub fn set_pair(&mut self, v: &Var, value: Complex64) -> &mut Self {
        self.values.insert(v.clone(), value);
        if !v.is_real() {
            self.values.insert(v.conj(), value.conj());
        }
        self
    }

    pub fn get(&self, v: &Var) -> Option<Complex64> {
        self.values.get(v).copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = (&Var, &Complex64)> {
        self.values.iter()
    }

    pub fn check_conjugates(&self) -> Result<(), ExprError> {
        for (v, z) in &self.values {
            if v.is_real() {
                if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
                    return Err(ExprError::InconsistentConjugates(v.name().to_string()));
                }
            } else if let Some(w) = self.values.get(&v.conj()) {
                if (w - z.conj()).norm() > 1e-12 * (1.0 + z.norm()) {
                    return Err(ExprError::InconsistentConjugates(v.name().to_string()));
                }
            }
        }
        Ok(())
    }
}

fn eval_atom(a: &Atom, at: &Assignment, table: &dyn FnTable) -> Result<Complex64, ExprError> {
    match a {
        Atom::Var(v) => at.get(v).ok_or_else(|| ExprError::MissingAssignment(v.name().to_string())),
        Atom::Fn(FnApp { sym, partials, at_origin }) => {
            let args: Vec<Complex64> = if *at_origin {
                vec![Complex64::new(0.0, 0.0); sym.args().len()]
            } else {
                sym.args()
                    .iter()
                    .map(|v| at.get(v).ok_or_else(|| ExprError::MissingAssignment(v.name().to_string())))
                    .collect::<Result<_, _>>()?
            };
            table
                .eval(sym, partials, &args)
                .ok_or_else(|| ExprError::MissingAssignment(sym.name().to_string()))
        }
    }
}

pub(crate) fn eval_poly(p: &Poly, at: &Assignment, table: &dyn FnTable) -> Result<Complex64, ExprError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in &p.0 {
        let mut t = c.to_c64();
        for (a, e) in &m.0 {
            t *= eval_atom(a, at, table)?.powu(*e);
        }
        acc += t;
    }
    Ok(acc)
}

impl Expr {
    pub fn eval(&self, at: &Assignment, table: &dyn FnTable) -> Result<Complex64, ExprError> {
        at.check_conjugates()?;
        let n = eval_poly(self.numerator(), at, table)?;
        let mut d = Complex64::new(1.0, 0.0);
        for (f, k) in self.denominator_factors() {
            d *= eval_poly(f, at, table)?.powu(*k);
        }
        if d.norm() == 0.0 {
            return Err(ExprError::DivisionByZero);
        }
        Ok(n / d)
    }
}
