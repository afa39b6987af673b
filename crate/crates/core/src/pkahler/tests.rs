use num_complex::Complex64;

use super::*;
use crate::acs::AlmostComplexStructure;
use crate::exterior::Frame;
use crate::symexpr::FnSym;

fn sl2c_basis() -> (Arc<Basis>, Frame) {
    let b = Basis::complex_named("psi", 3);
    let w = |names: &[&str], c: i64| Form::wedge_of(&b, names, Expr::int(c)).unwrap();
    let d1 = w(&["psi2", "psi3"], 1);
    let d2 = w(&["psi1", "psi3"], -1);
    let d3 = w(&["psi1", "psi2"], 1);
    let structure = vec![d1.clone(), d2.clone(), d3.clone(), d1.conj(), d2.conj(), d3.conj()];
    let fr = Frame::invariant(&b, structure).unwrap();
    (b, fr)
}

fn sl2c_omega(b: &Arc<Basis>) -> Form {
    let q = Expr::ratio(1, 4);
    let w = |names: &[&str]| Form::wedge_of(b, names, q.clone()).unwrap();
    &(&w(&["psi1", "psi2", "psibar1", "psibar2"]) + &w(&["psi1", "psi3", "psibar1", "psibar3"]))
        + &w(&["psi2", "psi3", "psibar2", "psibar3"])
}

#[test]
fn sigma_matches_direct_power() {
    for p in 0..7usize {
        let mut z = Complex64::new(1.0, 0.0);
        for _ in 0..p * p {
            z *= Complex64::new(0.0, 1.0);
        }
        z /= 2f64.powi(p as i32);
        let s = sigma_vol(p).as_constant().unwrap().to_c64();
        assert!((s - z).norm() < 1e-15, "p = {p}");
    }
    assert_eq!(sigma_vol(1), Expr::i() * Expr::ratio(1, 2));
    assert_eq!(sigma_vol(2), Expr::ratio(1, 4));
}

#[test]
fn sigma_normalizes_the_volume() {
    for n in 1..=4 {
        let b = Basis::complex_named("phi", n);
        let holo: Vec<usize> = b.holomorphic();
        let anti: Vec<usize> = holo.iter().map(|&j| b.conj_index(j)).collect();
        let all: Vec<usize> = holo.iter().chain(anti.iter()).copied().collect();
        let top = Form::monomial(&b, &all, sigma_vol(n));
        assert_eq!(top, vol(&b).unwrap(), "n = {n}");
    }
}

#[test]
fn sl2c_pairing_against_psi1() {
    let (b, _) = sl2c_basis();
    let omega = sl2c_omega(&b);
    let psi = Form::named(&b, "psi1").unwrap();
    // only ¼ψ^{232̄3̄} survives against ψ^{11̄}
    let a = transversality_pairing(&omega, &psi).unwrap();
    assert_eq!(a, Expr::one());
}

#[test]
fn sl2c_omega_is_transverse_and_exact_range_free() {
    let (b, fr) = sl2c_basis();
    let omega = sl2c_omega(&b);
    let r = is_transverse(&omega, &TransverseOptions::default(), &NoFunctions).unwrap();
    assert_eq!(r.verdict, Verdict::TransverseExact);
    assert!(fr.d(&omega).unwrap().is_zero());
}

#[test]
fn negative_form_has_a_witness() {
    let (b, _) = sl2c_basis();
    let omega = sl2c_omega(&b).scale(&Expr::int(-1));
    let r = is_transverse(&omega, &TransverseOptions::default(), &NoFunctions).unwrap();
    assert_eq!(r.verdict, Verdict::NotTransverse);
    let w = r.witness.unwrap();
    let pairing = transversality_pairing(&omega, w.psi.as_ref().unwrap()).unwrap();
    assert!(!is_positive_constant(&pairing));
}

#[test]
fn mixed_sign_form_gets_eigenvector_witness() {
    let b = Basis::complex_named("phi", 2);
    // h = [[1, 2], [2, 1]] is indefinite although both diagonal entries are positive
    let half_i = Expr::i() * Expr::ratio(1, 2);
    let m = |a: &str, c: &str, k: i64| Form::wedge_of(&b, &[a, c], &half_i * &Expr::int(k)).unwrap();
    let omega = &(&m("phi1", "phibar1", 1) + &m("phi2", "phibar2", 1)) + &(&m("phi1", "phibar2", 2) + &m("phi2", "phibar1", 2));
    assert!(omega.is_real());
    let r = is_transverse(&omega, &TransverseOptions::default(), &NoFunctions).unwrap();
    assert_eq!(r.verdict, Verdict::NotTransverse);
    assert!(r.witness.is_some());
}

fn c4_forms(tau: &Expr) -> (Frame, Coframe, Form, Form) {
    let fr = Frame::real_coordinates(4);
    let x2 = fr.coord("x2").unwrap().clone();
    let x3 = fr.coord("x3").unwrap().clone();
    let g = Expr::func(&FnSym::real("g", &[x2, x3]));
    let j = AlmostComplexStructure::from_vector_action(
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
    .unwrap();
    let dx: Vec<Form> = (1..=4).map(|k| Form::named(fr.basis(), &format!("dx{k}")).unwrap()).collect();
    let phi = j.coframe_from(&dx).unwrap();
    let cf = Coframe::new(&phi, "Phi").unwrap();
    let s2 = sigma_vol(2);
    let mut omega = Form::zero(fr.basis());
    for a in 0..4 {
        for c in a + 1..4 {
            let pp = phi[a].wedge(&phi[c]).unwrap();
            omega = &omega + &pp.wedge(&pp.conj()).unwrap().scale(&s2);
        }
    }
    let x = phi[1].wedge(&phi[2].conj()).unwrap().wedge(&phi[3]).unwrap().wedge(&phi[3].conj()).unwrap();
    let omega_tau = &omega - &x.re().scale(tau);
    (fr, cf, omega, omega_tau)
}

#[test]
fn c4_literal_sum_is_negative_and_sign_corrected_sum_is_positive() {
    let (fr, cf, omega, _) = c4_forms(&Expr::zero());
    let phi = cf.holomorphic();
    let mut literal = Form::zero(fr.basis());
    for a in 0..4 {
        for c in a + 1..4 {
            let t = phi[a].wedge(&phi[a].conj()).unwrap().wedge(&phi[c]).unwrap().wedge(&phi[c].conj()).unwrap();
            literal = &literal + &t.scale(&Expr::ratio(1, 4));
        }
    }
    assert_eq!(literal, omega.scale(&Expr::int(-1)));
    let psi = cf.to_coframe(&phi[0].wedge(&phi[1]).unwrap()).unwrap();
    let a = transversality_pairing(&cf.to_coframe(&omega).unwrap(), &psi).unwrap();
    assert!(is_positive_constant(&a));
    let b = transversality_pairing(&cf.to_coframe(&literal).unwrap(), &psi).unwrap();
    assert!(!is_positive_constant(&b));
}

#[test]
fn c4_certified_tau_range() {
    let tau = Var::real_parameter("tau");
    let (fr, cf, _, omega_tau) = c4_forms(&Expr::var(&tau));
    let in_cf = cf.to_coframe(&omega_tau).unwrap();
    let r = is_transverse(&in_cf, &TransverseOptions::default(), &NoFunctions).unwrap();
    assert_eq!(r.verdict, Verdict::TransverseExact);
    let range = r.certified_range.unwrap();
    let quarter = BigRational::new(1.into(), 4.into());
    assert!(range.contains(&quarter) && range.contains(&-quarter.clone()));
    assert_eq!(range.upper, Some(BigRational::new(1.into(), 2.into())));
    // d(Ω_τ) for opaque g: the closedness condition g_x2 - 2τ g_x3
    let d = fr.d(&omega_tau).unwrap();
    assert_eq!(d.len(), 1);
}

#[test]
fn iwasawa_standard_metric_is_balanced_not_kahler() {
    let fr = Frame::real_coordinates(3);
    let phi3 = &fr.dz(3).unwrap() - &fr.dz(2).unwrap().scale(&fr.z(1).unwrap());
    let cf = Coframe::new(&[fr.dz(1).unwrap(), fr.dz(2).unwrap(), phi3], "phi").unwrap();
    let omega = cf.to_parent(&standard_omega(cf.basis())).unwrap();
    let m = metric_predicates(&omega, &fr, &cf).unwrap();
    assert!(m.positive && m.balanced && !m.kahler);
    assert_eq!(m.closed_powers, vec![false, true]);
}

#[test]
fn standard_metric_on_c3_is_kahler() {
    let fr = Frame::real_coordinates(3);
    let cf = Coframe::new(&(1..=3).map(|j| fr.dz(j).unwrap()).collect::<Vec<_>>(), "phi").unwrap();
    let omega = cf.to_parent(&standard_omega(cf.basis())).unwrap();
    let m = metric_predicates(&omega, &fr, &cf).unwrap();
    assert!(m.kahler && m.balanced);
    assert!(matches!(
        metric_predicates(&omega.scale(&Expr::int(-1)), &fr, &cf),
        Err(Error::NotPositive(_))
    ));
}

#[test]
fn sampling_agrees_with_exact_minors_for_hypersurface_case() {
    let (b, _) = sl2c_basis();
    let omega = sl2c_omega(&b);
    let (words, h) = hermitian_form(&omega).unwrap();
    let hnum = h.eval(&Assignment::new(), &NoFunctions).unwrap();
    let opts = TransverseOptions { samples: 10_000, seed: 7, ..Default::default() };
    let r = sample(&words, &hnum, 3, 1, &opts, &b, &b.holomorphic());
    assert_eq!(r.verdict, Verdict::TransverseSampled);
    assert!(r.margin.unwrap() > 0.0);
    let neg = hnum.map(|z| -z);
    let r = sample(&words, &neg, 3, 1, &opts, &b, &b.holomorphic());
    assert_eq!(r.verdict, Verdict::NotTransverse);
}
