//! Hand-built fixtures shared by unit tests.

use std::sync::Arc;

use crate::acs::{AlmostComplexStructure, DeformationFamily};
use crate::exterior::{Basis, Coframe, Form, Frame, Matrix};
use crate::symexpr::{Expr, FnSym, Var};

pub fn heisenberg(n: usize) -> Frame {
    let b = Basis::complex_named("phi", n);
    let mut structure = vec![Form::zero(&b); 2 * n];
    let mut top = Form::zero(&b);
    for j in 1..n {
        top = &top + &Form::wedge_of(&b, &[&format!("phi{j}"), &format!("phibar{j}")], Expr::ratio(1, 2)).unwrap();
    }
    let hn = b.index_of(&format!("phi{n}")).unwrap();
    structure[b.conj_index(hn)] = top.conj();
    structure[hn] = top;
    Frame::invariant(&b, structure).unwrap()
}

/// `β = φⁿ ∧ φ^{11̄} ∧ … ∧ φ^{(k-1)(k-1)̄}` with `k = n - p`.
pub fn heisenberg_beta(frame: &Frame, p: usize) -> Form {
    let b = frame.basis();
    let n = b.dim() / 2;
    let mut beta = Form::named(b, &format!("phi{n}")).unwrap();
    for j in 1..n - p {
        beta = beta.wedge(&Form::wedge_of(b, &[&format!("phi{j}"), &format!("phibar{j}")], Expr::one()).unwrap()).unwrap();
    }
    beta
}

pub fn sl2c() -> Frame {
    let b = Basis::complex_named("psi", 3);
    let w = |names: &[&str], c: i64| Form::wedge_of(&b, names, Expr::int(c)).unwrap();
    let d1 = w(&["psi2", "psi3"], 1);
    let d2 = w(&["psi1", "psi3"], -1);
    let d3 = w(&["psi1", "psi2"], 1);
    Frame::invariant(&b, vec![d1.clone(), d2.clone(), d3.clone(), d1.conj(), d2.conj(), d3.conj()]).unwrap()
}

/// `ψ³_t = ψ³ - t ψ̄³` over the invariant frame.
pub fn sl2c_family(frame: &Frame) -> (DeformationFamily, Var) {
    let b = frame.basis();
    let cf = Coframe::new(&(1..=3).map(|j| Form::named(b, &format!("psi{j}")).unwrap()).collect::<Vec<_>>(), "psi").unwrap();
    let (t, _) = Var::complex_parameter("t", "tbar");
    let mut sigma = Matrix::zeros(3, 3);
    sigma.set(2, 2, Expr::var(&t));
    (DeformationFamily::new(cf, sigma, vec![t.clone()], "psit").unwrap(), t)
}

pub fn iwasawa_base(fr: &Frame) -> Coframe {
    let phi3 = &fr.dz(3).unwrap() - &fr.dz(2).unwrap().scale(&fr.z(1).unwrap());
    Coframe::new(&[fr.dz(1).unwrap(), fr.dz(2).unwrap(), phi3], "phi").unwrap()
}

pub fn iwasawa_family(fr: &Frame) -> (DeformationFamily, Var) {
    let t = Var::real_parameter("t");
    let mut sigma = Matrix::zeros(3, 3);
    sigma.set(1, 0, Expr::var(&t));
    sigma.set(0, 1, -Expr::var(&t));
    (DeformationFamily::new(iwasawa_base(fr), sigma, vec![t.clone()], "phit").unwrap(), t)
}

pub fn torus_j(fr: &Frame, u: &Expr, v: &Expr) -> AlmostComplexStructure {
    let two = Expr::int(2);
    AlmostComplexStructure::from_vector_action(
        fr.basis(),
        &[
            ("dx1", vec![("dx3", &two * v), ("dy1", Expr::one()), ("dy3", -(&two * u))]),
            ("dx2", vec![("dy2", Expr::one())]),
            ("dx3", vec![("dy3", Expr::one())]),
            ("dy1", vec![("dx1", -Expr::one()), ("dx3", -(&two * u)), ("dy3", -(&two * v))]),
            ("dy2", vec![("dx2", -Expr::one())]),
            ("dy3", vec![("dx3", -Expr::one())]),
        ],
    )
    .unwrap()
}

pub fn opaque_uv(fr: &Frame) -> (Expr, Expr) {
    let x2 = fr.coord("x2").unwrap().clone();
    let y2 = fr.coord("y2").unwrap().clone();
    (
        Expr::func(&FnSym::real("u", &[x2.clone(), y2.clone()])),
        Expr::func(&FnSym::real("v", &[x2, y2])),
    )
}

pub fn c4_j(fr: &Frame, g: &Expr) -> AlmostComplexStructure {
    AlmostComplexStructure::from_vector_action(
        fr.basis(),
        &[
            ("dx1", vec![("dx3", g.clone()), ("dy1", Expr::one())]),
            ("dx2", vec![("dy2", Expr::one())]),
            ("dx3", vec![("dy3", Expr::one())]),
            ("dx4", vec![("dy4", Expr::one())]),
            ("dy1", vec![("dx1", -Expr::one()), ("dy3", -g.clone())]),
            ("dy2", vec![("dx2", -Expr::one())]),
            ("dy3", vec![("dx3", -Expr::one())]),
            ("dy4", vec![("dx4", -Expr::one())]),
        ],
    )
    .unwrap()
}

pub fn opaque_g(fr: &Frame) -> Expr {
    let x2 = fr.coord("x2").unwrap().clone();
    let x3 = fr.coord("x3").unwrap().clone();
    Expr::func(&FnSym::real("g", &[x2, x3]))
}

pub fn flat(n: usize) -> Frame {
    let b: Arc<Basis> = Basis::complex_named("dz", n);
    Frame::invariant(&b, vec![Form::zero(&b); 2 * n]).unwrap()
}
