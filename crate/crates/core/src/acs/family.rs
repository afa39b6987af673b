use num_complex::Complex64;

use super::AlmostComplexStructure;
use crate::error::{Error, Result};
use crate::exterior::{Coframe, Form, Frame, Matrix};
use crate::symexpr::{Assignment, Expr, FnTable, Var};

/// `φ^j_t = φ^j - Σ_k σ^j_k(z,t) φ̄^k` over a base (1,0)-coframe.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    base: Coframe,
    sigma: Matrix,
    params: Vec<Var>,
    stem: String,
}

impl DeformationFamily {
    /// `sigma[j][k]` is `σ^j_k`; it must vanish when every parameter is zero.
    pub fn new(base: Coframe, sigma: Matrix, params: Vec<Var>, stem: &str) -> Result<Self> {
        let n = base.n();
        assert_eq!((sigma.rows(), sigma.cols()), (n, n));
        let fam = DeformationFamily { base, sigma, params, stem: stem.to_string() };
        let at0 = fam.sigma_at_zero()?;
        if !at0.is_zero() {
            return Err(Error::Invalid(format!("sigma does not vanish at t = 0:\n{at0}")));
        }
        Ok(fam)
    }

    /// The single structure `φ^j - σ^j_k φ̄^k` for a `σ` that need not
    /// vanish anywhere, e.g. a family with its parameters fixed.
    pub fn member(base: Coframe, sigma: Matrix, stem: &str) -> Result<Coframe> {
        DeformationFamily { base, sigma, params: Vec::new(), stem: stem.to_string() }.deformed()
    }

    pub fn base(&self) -> &Coframe {
        &self.base
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn params(&self) -> &[Var] {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    fn sigma_at_zero(&self) -> Result<Matrix> {
        let mut s = self.sigma.clone();
        for t in &self.params {
            let mut out = Matrix::zeros(s.rows(), s.cols());
            for j in 0..s.rows() {
                for k in 0..s.cols() {
                    out.set(j, k, s.get(j, k).subs(t, &Expr::zero())?);
                }
            }
            s = out;
        }
        Ok(s)
    }

    /// `∂σ/∂t` at `t = 0` (all parameters zero).
    pub fn sigma_dot(&self, t: &Var) -> Result<Matrix> {
        let d = DeformationFamily { sigma: self.sigma.map(|e| e.diff(t)), ..self.clone() };
        d.sigma_at_zero()
    }

    /// The deformed (1,0)-forms in the parent basis.
    pub fn deformed_forms(&self) -> Vec<Form> {
        let holo = self.base.holomorphic();
        let anti: Vec<Form> = holo.iter().map(Form::conj).collect();
        (0..self.n())
            .map(|j| {
                let mut f = holo[j].clone();
                for (k, a) in anti.iter().enumerate() {
                    let s = self.sigma.get(j, k);
                    if !s.is_zero() {
                        f = &f - &a.scale(s);
                    }
                }
                f
            })
            .collect()
    }

    pub fn deformed(&self) -> Result<Coframe> {
        Coframe::new(&self.deformed_forms(), &self.stem)
    }

    /// `J_t` on the parent basis: the structure whose (1,0)-forms are `φ^j_t`.
    pub fn reconstruct_jt(&self) -> Result<AlmostComplexStructure> {
        AlmostComplexStructure::from_coframe(&self.deformed()?)
    }

    /// `J_0`.
    pub fn base_structure(&self) -> Result<AlmostComplexStructure> {
        AlmostComplexStructure::from_coframe(&self.base)
    }

    /// `L_t = (J + J_t)^{-1}(J - J_t)` with its defining properties checked.
    pub fn l_t(&self) -> Result<LtReport> {
        let j0 = self.base_structure()?;
        let jt = self.reconstruct_jt()?;
        let a0 = j0.matrix().clone();
        let at = jt.matrix().clone();
        let l = a0.add(&at).inverse()?.mul(&a0.sub(&at));
        let anticommutes = l.mul(&a0).add(&a0.mul(&l)).is_zero();
        let id = Matrix::identity(l.rows());
        let conjugates = at.mul(&id.add(&l)).sub(&id.add(&l).mul(&a0)).is_zero();
        // φ^j ∘ L = Σ_k σ^j_k φ̄^k on row vectors of covector coefficients
        let f = self.base.forward();
        let hol = self.base.basis().holomorphic();
        let mut sigma_consistent = true;
        for (j, &hj) in hol.iter().enumerate() {
            let lhs = Matrix::from_fn(1, f.cols(), |_, c| f.get(hj, c).clone()).mul(&l);
            let mut rhs = Matrix::zeros(1, f.cols());
            for (k, &hk) in hol.iter().enumerate() {
                let bar = self.base.basis().conj_index(hk);
                rhs = rhs.add(&Matrix::from_fn(1, f.cols(), |_, c| f.get(bar, c) * self.sigma.get(j, k)));
            }
            sigma_consistent &= lhs.sub(&rhs).is_zero();
        }
        Ok(LtReport { l, anticommutes, conjugates, sigma_consistent })
    }
}

/// `L_t` in the vector (column) convention on the parent basis.
#[derive(Clone, Debug)]
pub struct LtReport {
    pub l: Matrix,
    /// `L J + J L = 0`.
    pub anticommutes: bool,
    /// `J_t (1 + L) = (1 + L) J`.
    pub conjugates: bool,
    /// `φ^j ∘ L = Σ_k σ^j_k φ̄^k`.
    pub sigma_consistent: bool,
}

impl LtReport {
    /// `g L = Lᵀ g` for a metric matrix `g` on the parent frame.
    pub fn is_g_symmetric(&self, g: &Matrix) -> bool {
        g.mul(&self.l).sub(&self.l.transpose().mul(g)).is_zero()
    }

    /// Operator 2-norm of `L` at a point.
    pub fn norm_at(&self, at: &Assignment, table: &dyn FnTable) -> Result<f64> {
        let m = self.l.eval(at, table)?;
        let svd = m.map(|z: Complex64| z).svd(false, false);
        Ok(svd.singular_values.iter().cloned().fold(0.0, f64::max))
    }

    /// Compatible at a point: `g`-symmetric and `‖L‖ < 1`.
    pub fn is_compatible_at(&self, g: &Matrix, at: &Assignment, table: &dyn FnTable) -> Result<bool> {
        Ok(self.is_g_symmetric(g) && self.norm_at(at, table)? < 1.0)
    }
}

/// `dφ^j_t` written in the deformed coframe `{φ_t, φ̄_t}`.
pub fn structure_equations_t(fam: &DeformationFamily, frame: &Frame) -> Result<(Coframe, Vec<Form>)> {
    let cf = fam.deformed()?;
    let eqs = cf
        .holomorphic()
        .iter()
        .map(|phi| cf.to_coframe(&frame.d(phi)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((cf, eqs))
}

/// The (0,2)-components of `dφ^j_t`; `J_t` is integrable iff all vanish.
pub fn integrability_defect(fam: &DeformationFamily, frame: &Frame) -> Result<Vec<Form>> {
    let (_, eqs) = structure_equations_t(fam, frame)?;
    eqs.iter().map(|e| e.bidegree_part(0, 2)).collect()
}
