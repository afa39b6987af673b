use std::sync::Arc;

use super::basis::Basis;
use super::form::Form;
use super::frame::Frame;
use super::linalg::Matrix;
use crate::error::{Error, Result};
use crate::symexpr::Expr;

/// A complex coframe `{θ^1..θ^n, θ̄^1..θ̄^n}` expressed in a parent basis,
/// with the inverse change of basis.
#[derive(Clone, Debug)]
pub struct Coframe {
    parent: Arc<Basis>,
    basis: Arc<Basis>,
    forms: Vec<Form>,
    forward: Matrix,
    inverse: Matrix,
    back_images: Vec<Form>,
}

impl Coframe {
    /// Coframe from `n` (1,0)-forms over a parent basis of dimension `2n`,
    /// named `{stem}1.., {stem}bar1..`.
    pub fn new(holo: &[Form], stem: &str) -> Result<Coframe> {
        Coframe::with_basis(holo, &Basis::complex_named(stem, holo.len()))
    }

    pub fn with_basis(holo: &[Form], basis: &Arc<Basis>) -> Result<Coframe> {
        let n = holo.len();
        let parent = holo.first().ok_or_else(|| Error::Invalid("empty coframe".into()))?.basis().clone();
        let holo_idx = basis.holomorphic();
        if parent.dim() != 2 * n || basis.dim() != 2 * n || holo_idx.len() != n || !basis.is_complex() {
            return Err(Error::Invalid(format!(
                "{n} (1,0)-forms cannot span a parent basis of dimension {}",
                parent.dim()
            )));
        }
        let mut forms = vec![Form::zero(&parent); 2 * n];
        for (j, h) in holo.iter().enumerate() {
            if !Basis::same(h.basis(), &parent) {
                return Err(Error::BasisMismatch);
            }
            if h.degrees().iter().any(|&d| d != 1) {
                return Err(Error::TypeMismatch(format!("coframe entry {h} is not a 1-form")));
            }
            forms[holo_idx[j]] = h.clone();
            forms[basis.conj_index(holo_idx[j])] = h.conj();
        }
        let forward = Matrix::from_fn(2 * n, 2 * n, |b, a| forms[b].coeff(super::Word::single(a)));
        let inverse = forward.inverse()?;
        let back_images = (0..2 * n)
            .map(|a| {
                Form::from_terms(basis, (0..2 * n).map(|b| (super::Word::single(b), inverse.get(a, b).clone())))
            })
            .collect();
        Ok(Coframe { parent, basis: basis.clone(), forms, forward, inverse, back_images })
    }

    pub fn parent(&self) -> &Arc<Basis> {
        &self.parent
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.forms.len() / 2
    }

    /// All `2n` coframe covectors written in the parent basis.
    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// The (1,0)-forms, in parent basis.
    pub fn holomorphic(&self) -> Vec<Form> {
        self.basis.holomorphic().into_iter().map(|i| self.forms[i].clone()).collect()
    }

    /// Rows are coframe covectors in the parent basis.
    pub fn forward(&self) -> &Matrix {
        &self.forward
    }

    /// Rows are parent covectors in the coframe basis.
    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn to_coframe(&self, f: &Form) -> Result<Form> {
        if !Basis::same(f.basis(), &self.parent) {
            return Err(Error::BasisMismatch);
        }
        f.substitute(&self.back_images, &self.basis)
    }

    pub fn to_parent(&self, f: &Form) -> Result<Form> {
        if !Basis::same(f.basis(), &self.basis) {
            return Err(Error::BasisMismatch);
        }
        f.substitute(&self.forms, &self.parent)
    }

    /// The `(p,q)` component of a parent-basis form, written in the coframe basis.
    pub fn project(&self, f: &Form, p: usize, q: usize) -> Result<Form> {
        self.to_coframe(f)?.bidegree_part(p, q)
    }

    pub fn frame(&self, parent: &Frame) -> Result<Frame> {
        Frame::induced(parent, self)
    }

    /// Determinant of the change of basis.
    pub fn det(&self) -> Expr {
        self.forward.det()
    }
}
