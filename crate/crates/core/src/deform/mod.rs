//! First-order analysis of metric families along a deformation: `ω_t`,
//! `Ω_t = ω_t^{n-1}/(n-1)!`, the components `η` and `λ` of `dΩ_t/dt` at
//! `t = 0`, and the semi-Kähler necessary conditions they must satisfy.

use serde::Serialize;

use crate::acs::DeformationFamily;
use crate::error::{Error, Result};
use crate::exterior::{Basis, Coframe, Form, Frame, Matrix};
use crate::pkahler::{is_positive_constant, leading_minors};
use crate::symexpr::{Expr, Var};

/// A deformation family with Hermitian coefficients `ω_{jk}(z,t)`.
#[derive(Clone, Debug)]
pub struct MetricFamily {
    family: DeformationFamily,
    h: Matrix,
}

fn at_zero(e: &Expr, params: &[Var]) -> Result<Expr> {
    let mut e = e.clone();
    for t in params {
        e = e.subs(t, &Expr::zero())?;
    }
    Ok(e)
}

impl MetricFamily {
    /// `h` must equal its conjugate transpose and be positive definite at
    /// `t = 0` (checked at the origin when it varies over the manifold).
    pub fn new(family: DeformationFamily, h: Matrix) -> Result<Self> {
        let n = family.n();
        if (h.rows(), h.cols()) != (n, n) {
            return Err(Error::Invalid(format!("metric matrix must be {n}×{n}")));
        }
        if h.conj().transpose() != h {
            return Err(Error::TypeMismatch("metric matrix is not Hermitian".into()));
        }
        let mut h0 = Matrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                h0.set(j, k, at_zero(h.get(j, k), family.params())?.at_origin());
            }
        }
        if !leading_minors(&h0).iter().all(is_positive_constant) {
            return Err(Error::NotPositive(format!("metric matrix at t = 0:\n{h0}")));
        }
        Ok(MetricFamily { family, h })
    }

    /// `ω_{jk} = δ_{jk}`.
    pub fn identity(family: DeformationFamily) -> Result<Self> {
        let n = family.n();
        MetricFamily::new(family, Matrix::identity(n))
    }

    pub fn family(&self) -> &DeformationFamily {
        &self.family
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    /// `ω_t = (i/2) Σ ω_{jk} φ^j_t ∧ φ̄^k_t` in the parent basis.
    pub fn omega(&self) -> Result<Form> {
        let phi = self.family.deformed_forms();
        let half_i = Expr::i() * Expr::ratio(1, 2);
        let mut w = Form::zero(self.family.base().parent());
        for j in 0..phi.len() {
            for k in 0..phi.len() {
                let c = self.h.get(j, k);
                if !c.is_zero() {
                    w = &w + &phi[j].wedge(&phi[k].conj())?.scale(&(&half_i * c));
                }
            }
        }
        Ok(w)
    }

    /// `Ω_t = ω_t^{n-1} / (n-1)!`.
    pub fn big_omega(&self) -> Result<Form> {
        let n = self.family.n();
        let fact: i64 = (1..n as i64).product();
        Ok(self.omega()?.wedge_pow(n - 1).scale(&Expr::ratio(1, fact)))
    }
}

/// `ω_t` for a metric family.
pub fn omega_family(m: &MetricFamily) -> Result<Form> {
    m.omega()
}

/// `dΩ_t/dt` at `t = 0` split by type with respect to `J_0`, written in the
/// base coframe.
#[derive(Clone, Debug)]
pub struct FirstOrderData {
    pub param: Var,
    pub sigma_dot: Matrix,
    pub omega_dot: Form,
    /// The `(n-2, n)` part.
    pub eta: Form,
    /// The `(n-1, n-1)` part.
    pub lambda: Form,
    /// The `(n, n-2)` part, equal to `conj(η)`.
    pub eta_bar: Form,
}

/// Differentiate `Ω_t` in `t` and project onto the three admissible types.
pub fn first_order(m: &MetricFamily, t: &Var) -> Result<FirstOrderData> {
    let fam = m.family();
    let params = fam.params();
    if !params.contains(t) {
        return Err(Error::UnknownName(t.name().to_string()));
    }
    let n = fam.n();
    let dot = m.big_omega()?.diff_param(t);
    let dot = dot.try_map_coeffs(|e| {
        let mut e = e.clone();
        for s in params {
            e = e.subs(s, &Expr::zero())?;
        }
        Ok(e)
    })?;
    let in_base = fam.base().to_coframe(&dot)?;
    let eta = in_base.bidegree_part(n - 2, n)?;
    let lambda = in_base.bidegree_part(n - 1, n - 1)?;
    let eta_bar = in_base.bidegree_part(n, n - 2)?;
    let rest = in_base.checked_sub(&(&(&eta + &lambda) + &eta_bar))?;
    if !rest.is_zero() {
        return Err(Error::TypeLeak(rest.to_text()));
    }
    if !in_base.is_real() || eta.conj() != eta_bar {
        return Err(Error::TypeLeak(format!("derivative is not real: {in_base}")));
    }
    Ok(FirstOrderData { param: t.clone(), sigma_dot: fam.sigma_dot(t)?, omega_dot: in_base, eta, lambda, eta_bar })
}

/// One [`FirstOrderData`] per declared parameter.
pub fn multiparameter_first_order(m: &MetricFamily) -> Result<Vec<FirstOrderData>> {
    m.family().params().iter().map(|t| first_order(m, t)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SemiKahlerReport {
    pub param: String,
    /// `∂η + ∂̄λ`.
    pub residual: String,
    pub passes: bool,
    pub lambda_zero: bool,
    pub eta: String,
    pub lambda: String,
    /// For `n = 3`: `∂(B ∧ φ̄^{123})` with
    /// `B = (σ̇³₂-σ̇²₃)φ¹ + (σ̇¹₃-σ̇³₁)φ² + (σ̇²₁-σ̇¹₂)φ³`, which equals `4∂η`
    /// when `ω_{jk} = δ_{jk}`.
    pub corollary: Option<String>,
    /// For `n = 3` and `φ^j = dz_j`: the coefficients of the corollary form,
    /// one partial differential expression per `dz_j ∧ dz_k`.
    pub pdes: Option<Vec<String>>,
    #[serde(skip)]
    pub residual_form: Form,
    #[serde(skip)]
    pub corollary_form: Option<Form>,
    #[serde(skip)]
    pub pde_exprs: Option<Vec<Expr>>,
}

impl SemiKahlerReport {
    pub fn pdes_vanish(&self) -> Option<bool> {
        self.pde_exprs.as_ref().map(|v| v.iter().all(Expr::is_zero))
    }
}

/// `(σ̇³₂-σ̇²₃, σ̇¹₃-σ̇³₁, σ̇²₁-σ̇¹₂)`.
pub fn corollary_coefficients(sigma_dot: &Matrix) -> [Expr; 3] {
    let s = |j: usize, k: usize| sigma_dot.get(j - 1, k - 1).clone();
    [s(3, 2) - s(2, 3), s(1, 3) - s(3, 1), s(2, 1) - s(1, 2)]
}

fn is_dz_coframe(cf: &Coframe, frame: &Frame) -> bool {
    cf.holomorphic().iter().enumerate().all(|(j, f)| frame.dz(j + 1).is_ok_and(|dz| dz == *f))
}

/// Check `∂η + ∂̄λ = 0` for a family over `frame` (the frame of the base
/// coframe's parent basis).
pub fn semi_kahler_first_order_check(m: &MetricFamily, frame: &Frame, t: &Var) -> Result<SemiKahlerReport> {
    let base = m.family().base();
    if !Basis::same(frame.basis(), base.parent()) {
        return Err(Error::BasisMismatch);
    }
    let fo = first_order(m, t)?;
    let phi_frame = Frame::induced(frame, base)?;
    let residual = phi_frame.del(&fo.eta)?.checked_add(&phi_frame.delbar(&fo.lambda)?)?;
    let mut report = SemiKahlerReport {
        param: t.name().to_string(),
        residual: residual.to_text(),
        passes: residual.is_zero(),
        lambda_zero: fo.lambda.is_zero(),
        eta: fo.eta.to_text(),
        lambda: fo.lambda.to_text(),
        corollary: None,
        pdes: None,
        residual_form: residual,
        corollary_form: None,
        pde_exprs: None,
    };
    if m.family().n() == 3 {
        let b = base.basis();
        let a = corollary_coefficients(&fo.sigma_dot);
        let holo = b.holomorphic();
        let anti: Vec<usize> = holo.iter().map(|&j| b.conj_index(j)).collect();
        let bar123 = Form::monomial(b, &anti, Expr::one());
        let mut bracket = Form::zero(b);
        for (j, c) in a.iter().enumerate() {
            bracket = &bracket + &Form::covector(b, holo[j]).scale(c);
        }
        let cor = phi_frame.del(&bracket.wedge(&bar123)?)?;
        report.corollary = Some(cor.to_text());
        report.corollary_form = Some(cor);
        if is_dz_coframe(base, frame) {
            // ∂a/∂z_j is the φ^j-coefficient of da when φ^j = dz_j
            let grad = |e: &Expr| -> Result<Vec<Expr>> {
                let da = base.to_coframe(&frame.d_scalar(e)?)?;
                Ok(holo.iter().map(|&j| da.coeff(crate::exterior::Word::single(j))).collect())
            };
            let g: Vec<Vec<Expr>> = a.iter().map(grad).collect::<Result<_>>()?;
            let pdes = vec![
                &g[1][0] - &g[0][1],
                &g[2][0] - &g[0][2],
                &g[2][1] - &g[1][2],
            ];
            report.pdes = Some(pdes.iter().map(ToString::to_string).collect());
            report.pde_exprs = Some(pdes);
        }
    }
    Ok(report)
}
