use thiserror::Error;

use crate::symexpr::ExprError;

/// Errors raised by form, structure, and certificate operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("forms live over different covector bases")]
    BasisMismatch,
    #[error("form is not homogeneous (degrees {0:?})")]
    InhomogeneousForm(Vec<usize>),
    #[error("change of basis is not invertible: {0}")]
    SingularCoframe(String),
    #[error("coefficient depends on the point in an invariant frame: {0}")]
    PointDependentCoefficient(String),
    #[error("d∘d does not vanish on {0}")]
    NotAComplex(String),
    #[error("J∘J is not -id: {0}")]
    NotAComplexStructure(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("form is not positive: {0}")]
    NotPositive(String),
    #[error("derivative has components outside the expected bidegrees: {0}")]
    TypeLeak(String),
    #[error("the argument needs a compact manifold without boundary")]
    NotClosedManifold,
    #[error("coefficients do not share a sign: {0}")]
    SignMixed(String),
    #[error("not a simple covector: {0}")]
    NotSimple(String),
    #[error("ω is degenerate")]
    DegenerateOmega,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
