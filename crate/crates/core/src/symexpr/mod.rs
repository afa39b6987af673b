//! Exact symbolic scalars.
//!
//! Coefficients are polynomials over ℚ(i) in coordinates, parameters, and
//! opaque function applications, with denominators restricted to polynomials
//! in parameters. Zero-testing is exact.

mod eval;
mod expr;
mod gauss;
mod poly;
mod var;

pub use eval::{Assignment, ClosureTable, FnTable, NoFunctions};
pub use expr::Expr;
pub use gauss::GaussRat;
pub use poly::{Atom, FnApp, Monomial, Poly};
pub use var::{FnReality, FnSym, Var, VarContext, VarKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator depends on the point: {0}")]
    CoordinateDenominator(String),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("conjugate variables of `{0}` were assigned non-conjugate values")]
    InconsistentConjugates(String),
    #[error("`{0}` is already declared")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

/// Wirtinger derivative `∂/∂z = (∂/∂x - i ∂/∂y) / 2` for a real coordinate pair.
pub fn d_dz(e: &Expr, x: &Var, y: &Var) -> Expr {
    (e.diff(x) - Expr::i() * e.diff(y)) * Expr::ratio(1, 2)
}

/// `∂/∂z̄ = (∂/∂x + i ∂/∂y) / 2` for a real coordinate pair.
pub fn d_dzbar(e: &Expr, x: &Var, y: &Var) -> Expr {
    (e.diff(x) + Expr::i() * e.diff(y)) * Expr::ratio(1, 2)
}
