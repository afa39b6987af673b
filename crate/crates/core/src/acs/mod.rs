//! Almost complex structures, their (1,0)-coframes, deformation families
//! `φ^j_t = φ^j - Σ σ^j_k φ̄^k`, and integrability diagnostics.

mod family;

pub use family::{integrability_defect, structure_equations_t, DeformationFamily, LtReport};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{Basis, Coframe, Form, Matrix, Word};
use crate::symexpr::Expr;

/// `J` acting on a covector basis: `J e^a = Σ_c K[a][c] e^c`, with
/// `(J F)(V_1, …) = F(J V_1, …)`.
///
/// The same matrix read by columns is the action on the dual frame,
/// `J ∂_c = Σ_a K[a][c] ∂_a`.
#[derive(Clone, Debug)]
pub struct AlmostComplexStructure {
    basis: Arc<Basis>,
    k: Matrix,
}

impl AlmostComplexStructure {
    pub fn from_matrix(basis: &Arc<Basis>, k: Matrix) -> Result<Self> {
        assert_eq!((k.rows(), k.cols()), (basis.dim(), basis.dim()));
        let j = AlmostComplexStructure { basis: basis.clone(), k };
        j.check()?;
        Ok(j)
    }

    /// From the action on the dual frame: each rule is `J ∂_c = Σ coef ∂_a`,
    /// with vectors named by their covector (`"dx1"` for `∂_{x_1}`).
    pub fn from_vector_action(basis: &Arc<Basis>, rules: &[(&str, Vec<(&str, Expr)>)]) -> Result<Self> {
        let n = basis.dim();
        let mut k = Matrix::zeros(n, n);
        let idx = |s: &str| basis.index_of(s).ok_or_else(|| Error::UnknownName(s.to_string()));
        for (c, image) in rules {
            let c = idx(c)?;
            for (a, coef) in image {
                let a = idx(a)?;
                let v = k.get(a, c) + coef;
                k.set(a, c, v);
            }
        }
        AlmostComplexStructure::from_matrix(basis, k)
    }

    /// The structure whose (1,0)-forms are the holomorphic covectors of a coframe,
    /// written on the coframe's parent basis.
    pub fn from_coframe(cf: &Coframe) -> Result<Self> {
        let d: Vec<Expr> = (0..cf.basis().dim())
            .map(|b| match cf.basis().tag(b) {
                crate::exterior::Tag::Holomorphic => Expr::i(),
                _ => -Expr::i(),
            })
            .collect();
        let k = cf.inverse().mul(&Matrix::diagonal(&d)).mul(cf.forward());
        AlmostComplexStructure::from_matrix(cf.parent(), k)
    }

    /// `J ∂_{x_j} = ∂_{y_j}` on a basis containing `dxj`, `dyj`.
    pub fn standard_real(basis: &Arc<Basis>, n: usize) -> Result<Self> {
        let mut rules = Vec::new();
        let names: Vec<(String, String)> = (1..=n).map(|j| (format!("dx{j}"), format!("dy{j}"))).collect();
        for (x, y) in &names {
            rules.push((x.as_str(), vec![(y.as_str(), Expr::one())]));
            rules.push((y.as_str(), vec![(x.as_str(), -Expr::one())]));
        }
        AlmostComplexStructure::from_vector_action(basis, &rules)
    }

    /// Holomorphic covectors of a complex basis are the (1,0)-forms.
    pub fn standard_complex(basis: &Arc<Basis>) -> Result<Self> {
        let d: Vec<Expr> = (0..basis.dim())
            .map(|b| match basis.tag(b) {
                crate::exterior::Tag::Holomorphic => Ok(Expr::i()),
                crate::exterior::Tag::Antiholomorphic => Ok(-Expr::i()),
                crate::exterior::Tag::Real => Err(Error::TypeMismatch("basis has real covectors".into())),
            })
            .collect::<Result<_>>()?;
        AlmostComplexStructure::from_matrix(basis, Matrix::diagonal(&d))
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.k
    }

    /// `J∘J = -id`.
    pub fn check(&self) -> Result<()> {
        let sq = self.k.mul(&self.k);
        let n = self.basis.dim();
        for a in 0..n {
            for c in 0..n {
                let want = if a == c { -Expr::one() } else { Expr::zero() };
                if *sq.get(a, c) != want {
                    return Err(Error::NotAComplexStructure(format!(
                        "(J^2)[{}][{}] = {}",
                        self.basis.name(a),
                        self.basis.name(c),
                        sq.get(a, c)
                    )));
                }
            }
        }
        Ok(())
    }

    fn images(&self) -> Vec<Form> {
        let n = self.basis.dim();
        (0..n)
            .map(|a| Form::from_terms(&self.basis, (0..n).map(|c| (Word::single(c), self.k.get(a, c).clone()))))
            .collect()
    }

    /// `(J F)(V_1, …, V_k) = F(J V_1, …, J V_k)` on a homogeneous form.
    pub fn act(&self, f: &Form) -> Result<Form> {
        if !Basis::same(f.basis(), &self.basis) {
            return Err(Error::BasisMismatch);
        }
        f.degree()?;
        f.substitute(&self.images(), &self.basis)
    }

    /// `α - i Jα` for each `α`: (1,0)-forms, `dz_j` for the standard structure and `α = dx_j`.
    pub fn coframe_from(&self, alphas: &[Form]) -> Result<Vec<Form>> {
        alphas.iter().map(|a| Ok(a - &self.act(a)?.scale(&Expr::i()))).collect()
    }

    /// The (1,0)-coframe normalized against reference (1,0)-forms `ρ^j` of some
    /// other structure: `φ^j = ρ^j - Σ_k σ^j_k ρ̄^k`.
    ///
    /// Fails when the projections of the eigenforms onto `span{ρ}` are not
    /// invertible over the coefficient ring.
    pub fn coframe_of(&self, reference: &[Form]) -> Result<Vec<Form>> {
        let n = reference.len();
        if 2 * n != self.basis.dim() {
            return Err(Error::Invalid(format!("{n} reference forms on a basis of dimension {}", self.basis.dim())));
        }
        let half = Expr::ratio(1, 2);
        let beta: Vec<Form> = self.coframe_from(reference)?.iter().map(|b| b.scale(&half)).collect();
        let refs = Coframe::new(reference, "rho")?;
        let coords: Vec<Form> = beta.iter().map(|b| refs.to_coframe(b)).collect::<Result<_>>()?;
        let m = Matrix::from_fn(n, n, |j, k| coords[j].coeff(Word::single(k)));
        let minv = m.inverse()?;
        let out = (0..n)
            .map(|j| {
                let mut f = Form::zero(&self.basis);
                for k in 0..n {
                    f = &f + &beta[k].scale(minv.get(j, k));
                }
                f
            })
            .collect();
        Ok(out)
    }

    /// True when every form is a (1,0)-form: `J φ = i φ`.
    pub fn is_type_10(&self, phi: &[Form]) -> Result<bool> {
        for f in phi {
            if self.act(f)? != f.scale(&Expr::i()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise equality of the structures.
    pub fn same_as(&self, o: &AlmostComplexStructure) -> bool {
        Basis::same(&self.basis, &o.basis) && self.k.sub(&o.k).is_zero()
    }

    /// Restrict to the covectors named in `keep`, dropping the others; the
    /// block must be invariant for the result to be a structure.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        let idx = keep
            .iter()
            .map(|s| self.basis.index_of(s).ok_or_else(|| Error::UnknownName(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let basis = Basis::real(keep);
        let k = Matrix::from_fn(idx.len(), idx.len(), |a, c| self.k.get(idx[a], idx[c]).clone());
        AlmostComplexStructure::from_matrix(&basis, k)
    }
}
