use serde::Serialize;

use crate::acs::AlmostComplexStructure;
use crate::error::{Error, Result};
use crate::symexpr::{Expr, Var};

/// How the six real coordinates are numbered `x_1, …, x_6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering6 {
    /// `x1 x2 x3 y1 y2 y3`.
    Block,
    /// `x1 y1 x2 y2 x3 y3`.
    Interleaved,
    /// `y1 y2 y3 x1 x2 x3`.
    YBlock,
    /// `y1 x1 y2 x2 y3 x3`.
    InterleavedYx,
}

impl Ordering6 {
    pub const ALL: [Ordering6; 4] = [Ordering6::Block, Ordering6::Interleaved, Ordering6::YBlock, Ordering6::InterleavedYx];

    pub fn names(self) -> [&'static str; 6] {
        match self {
            Ordering6::Block => ["x1", "x2", "x3", "y1", "y2", "y3"],
            Ordering6::Interleaved => ["x1", "y1", "x2", "y2", "x3", "y3"],
            Ordering6::YBlock => ["y1", "y2", "y3", "x1", "x2", "x3"],
            Ordering6::InterleavedYx => ["y1", "x1", "y2", "x2", "y3", "x3"],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MtReport {
    pub ordering: Ordering6,
    pub eq1: String,
    pub eq2: String,
    pub obstructed: bool,
    #[serde(skip)]
    pub eq1_expr: Expr,
    #[serde(skip)]
    pub eq2_expr: Expr,
}

/// The two necessary conditions for local compatibility of `J` with a
/// symplectic form on `ℝ⁶`, with every derivative taken at the origin.
///
/// `J` lives on a basis whose covectors are named `d` + coordinate name;
/// `P_{ij}` is the `∂_i`-component of `J ∂_j`.
pub fn mt_obstruction(j: &AlmostComplexStructure, coords: &[Var], ordering: Ordering6) -> Result<MtReport> {
    j.check()?;
    let basis = j.basis();
    if basis.dim() != 6 {
        return Err(Error::Invalid(format!("expected a structure on ℝ⁶, got dimension {}", basis.dim())));
    }
    let names = ordering.names();
    let mut idx = [0usize; 6];
    let mut vars = Vec::with_capacity(6);
    for (a, name) in names.iter().enumerate() {
        idx[a] = basis.index_of(&format!("d{name}")).ok_or_else(|| Error::UnknownName(format!("d{name}")))?;
        vars.push(
            coords
                .iter()
                .find(|v| v.name() == *name)
                .cloned()
                .ok_or_else(|| Error::UnknownName(name.to_string()))?,
        );
    }
    let k = j.matrix();
    // A(i, j) = P_ij - P_ji, 1-based
    let a = |r: usize, c: usize| k.get(idx[r - 1], idx[c - 1]) - k.get(idx[c - 1], idx[r - 1]);
    let d = |m: usize, e: Expr| e.diff(&vars[m - 1]).at_origin();
    let eq1 = -d(1, a(2, 6)) - d(2, a(1, 6)) - d(3, a(1, 5)) - d(4, a(2, 3)) + d(5, a(1, 3)) - d(6, a(1, 2));
    let eq2 = -d(1, a(2, 3)) - d(2, a(1, 3)) - d(3, a(1, 2)) - d(4, a(2, 6)) + d(5, a(1, 6)) - d(6, a(1, 5));
    Ok(MtReport {
        ordering,
        eq1: eq1.to_string(),
        eq2: eq2.to_string(),
        obstructed: !eq1.is_zero() || !eq2.is_zero(),
        eq1_expr: eq1,
        eq2_expr: eq2,
    })
}

/// `Some(c)` when `e = c · target` for a nonzero constant `c`.
pub fn constant_multiple(e: &Expr, target: &Expr) -> Option<Expr> {
    let (m, tc) = target.numerator().leading_term()?;
    let ec = e.numerator().0.get(m)?;
    let c = Expr::constant(ec / tc);
    (!c.is_zero() && *e == &c * target).then_some(c)
}

/// One known outcome: equation `equation` (1 or 2) must be a nonzero
/// constant multiple of `target` for the structure `j`.
#[derive(Clone, Debug)]
pub struct MtExpectation {
    pub label: String,
    pub j: AlmostComplexStructure,
    pub coords: Vec<Var>,
    pub equation: u8,
    pub target: Expr,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationRow {
    pub ordering: Ordering6,
    /// Per expectation: the multiple found, if any.
    pub multiples: Vec<Option<String>>,
    pub passes: bool,
}

/// Evaluate every coordinate ordering against all expectations at once.
pub fn mt_calibrate(expectations: &[MtExpectation]) -> Result<Vec<CalibrationRow>> {
    Ordering6::ALL
        .iter()
        .map(|&ordering| {
            let mut multiples = Vec::new();
            for ex in expectations {
                let r = mt_obstruction(&ex.j, &ex.coords, ordering)?;
                let e = if ex.equation == 1 { &r.eq1_expr } else { &r.eq2_expr };
                multiples.push(constant_multiple(e, &ex.target).map(|c| c.to_string()));
            }
            let passes = multiples.iter().all(Option::is_some);
            Ok(CalibrationRow { ordering, multiples, passes })
        })
        .collect()
}
