use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::linalg::{solve, LinearSolution};
use crate::exterior::{Form, Frame, Matrix, Word};
use crate::symexpr::Expr;

#[derive(Clone, Debug, Serialize)]
pub struct DbarReport {
    pub p: usize,
    pub q: usize,
    pub exact: bool,
    pub preimage: Option<String>,
    /// Rank of `∂̄` from invariant `(p,q-1)`-forms and of the augmented system.
    pub rank: usize,
    pub augmented_rank: usize,
    /// Coefficients `y` over the `(p,q)` words with `yᵀ∂̄ = 0` and `yᵀα ≠ 0`.
    pub certificate: Option<Vec<(String, String)>>,
    #[serde(skip)]
    pub preimage_form: Option<Form>,
}

fn words_of_type(frame: &Frame, p: usize, q: usize) -> Vec<Word> {
    let basis = frame.basis();
    let dim = basis.dim();
    (0u64..(1u64 << dim))
        .map(Word)
        .filter(|&w| Form::word_bidegree(basis, w) == Some((p, q)))
        .collect()
}

/// Decide whether an invariant `(p,q)`-form is `∂̄` of an invariant
/// `(p,q-1)`-form.
pub fn invariant_dbar_class(alpha: &Form, frame: &Frame) -> Result<DbarReport> {
    let basis = frame.basis();
    if !crate::exterior::Basis::same(alpha.basis(), basis) {
        return Err(Error::BasisMismatch);
    }
    if !basis.is_complex() {
        return Err(Error::TypeMismatch("∂̄ needs a complex coframe".into()));
    }
    let bideg = alpha.bidegrees()?;
    let (p, q) = match bideg.len() {
        0 => {
            let zero = Form::zero(basis);
            return Ok(DbarReport {
                p: 0,
                q: 0,
                exact: true,
                preimage: Some(zero.to_text()),
                rank: 0,
                augmented_rank: 0,
                certificate: None,
                preimage_form: Some(zero),
            });
        }
        1 => *bideg.iter().next().unwrap(),
        _ => return Err(Error::TypeMismatch(format!("{alpha} is not of pure type"))),
    };
    if q == 0 {
        return Err(Error::TypeMismatch(format!("{alpha} has q = 0")));
    }
    let sources = words_of_type(frame, p, q - 1);
    let targets = words_of_type(frame, p, q);
    let images: Vec<Form> = sources
        .iter()
        .map(|&w| frame.delbar(&Form::from_terms(basis, [(w, Expr::one())])))
        .collect::<Result<_>>()?;
    let a = Matrix::from_fn(targets.len(), sources.len(), |r, c| images[c].coeff(targets[r]));
    let b: Vec<Expr> = targets.iter().map(|&w| alpha.coeff(w)).collect();
    match solve(&a, &b)? {
        LinearSolution::Solved { particular, rank, .. } => {
            let xi = Form::from_terms(basis, sources.iter().copied().zip(particular));
            if frame.delbar(&xi)? != *alpha {
                return Err(Error::Invalid(format!("preimage {xi} does not map to {alpha}")));
            }
            Ok(DbarReport {
                p,
                q,
                exact: true,
                preimage: Some(xi.to_text()),
                rank,
                augmented_rank: rank,
                certificate: None,
                preimage_form: Some(xi),
            })
        }
        LinearSolution::Inconsistent { certificate, rank, augmented_rank, .. } => {
            let zero = Form::zero(basis);
            let cert = targets
                .iter()
                .zip(&certificate)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&w, c)| (zero.word_name(w), c.to_string()))
                .collect();
            Ok(DbarReport { p, q, exact: false, preimage: None, rank, augmented_rank, certificate: Some(cert), preimage_form: None })
        }
    }
}
