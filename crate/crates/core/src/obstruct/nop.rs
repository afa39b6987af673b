use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Form, Frame, Word};
use crate::pkahler::constant_sign;
use crate::symexpr::{Atom, Expr, Var};

/// A non-closed form `β` of degree `2n-2p-1` whose differential has
/// `(dβ)^{n-p,n-p} = Σ c_k ψ_k ∧ ψ̄_k` with simple `(n-p,0)` covectors `ψ_k`
/// and real coefficients of one sign.
#[derive(Clone, Debug)]
pub struct NopCertificate {
    pub beta: Form,
    pub p: usize,
    pub decomposition: Vec<(Expr, Form)>,
}

impl NopCertificate {
    /// Read the decomposition off the terms `φ^I ∧ φ̄^I` of `(dβ)^{n-p,n-p}`.
    pub fn diagonal(beta: Form, p: usize, frame: &Frame) -> Result<Self> {
        let kk = middle_part(&beta, p, frame)?;
        let decomposition = diagonal_decomposition(&kk)?;
        Ok(NopCertificate { beta, p, decomposition })
    }
}

fn middle_part(beta: &Form, p: usize, frame: &Frame) -> Result<Form> {
    let basis = beta.basis();
    let n = basis.holomorphic().len();
    if p == 0 || p >= n {
        return Err(Error::Invalid(format!("p = {p} outside 1..{}", n.saturating_sub(1))));
    }
    frame.d(beta)?.bidegree_part(n - p, n - p)
}

/// `[(c_I, φ^I)]` for a form that is a combination of `φ^I ∧ φ̄^I`.
///
/// With holomorphic covectors ordered first, `φ^I ∧ φ̄^I` is already the
/// sorted word, so `c_I` is the coefficient as stored.
pub fn diagonal_decomposition(f: &Form) -> Result<Vec<(Expr, Form)>> {
    let basis = f.basis();
    let mut out = Vec::new();
    for (w, c) in f.terms() {
        let idx = w.indices();
        let holo: Vec<usize> = idx.iter().copied().filter(|&i| basis.holomorphic().contains(&i)).collect();
        let mut pair: Vec<usize> = holo.clone();
        pair.extend(holo.iter().map(|&i| basis.conj_index(i)));
        if Word::from_indices(&pair).map(|(_, u)| u) != Some(w) {
            return Err(Error::Invalid(format!("term {} is not of the form φ^I∧φ̄^I", f.word_name(w))));
        }
        out.push((c.clone(), Form::monomial(basis, &holo, Expr::one())));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct NopReport {
    pub n: usize,
    pub p: usize,
    pub d_beta: String,
    pub coefficients: Vec<String>,
    /// `+1` or `-1`.
    pub sign: i8,
    /// The condition under which `dβ ≠ 0`, e.g. `t != 0`.
    pub nonvanishing: String,
    /// The leading coefficient at every parameter set to `1/2`.
    pub witness: Option<String>,
    pub verdict: String,
}

fn is_simple(psi: &Form, k: usize) -> Result<bool> {
    if !psi.is_pure(k, 0)? {
        return Ok(false);
    }
    Ok(match k {
        0 | 1 => true,
        2 => psi.wedge(psi)?.is_zero(),
        _ => psi.len() == 1,
    })
}

fn params_of(e: &Expr) -> Vec<Var> {
    e.atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Var(v) if v.is_parameter() => Some(v),
            _ => None,
        })
        .collect()
}

/// Verify a certificate and conclude that no almost p-Kähler form exists.
///
/// The conclusion integrates `d(Ω ∧ β)` over the manifold, so `compact` must
/// be set. Coefficients may depend on parameters; the report then records
/// the condition under which `dβ` is nonzero.
pub fn nop_test(cert: &NopCertificate, frame: &Frame, compact: bool) -> Result<NopReport> {
    if !compact {
        return Err(Error::NotClosedManifold);
    }
    let basis = cert.beta.basis();
    if !crate::exterior::Basis::same(basis, frame.basis()) {
        return Err(Error::BasisMismatch);
    }
    let n = basis.holomorphic().len();
    let p = cert.p;
    let deg = cert.beta.degree()?;
    if p == 0 || p >= n || deg != 2 * n - 2 * p - 1 {
        return Err(Error::Invalid(format!("β has degree {deg}, expected {} for p = {p}", 2 * n - 2 * p - 1)));
    }
    let k = n - p;
    let d_beta = frame.d(&cert.beta)?;
    if d_beta.is_zero() {
        return Err(Error::Invalid("β is closed".into()));
    }
    let kk = d_beta.bidegree_part(k, k)?;
    if cert.decomposition.is_empty() {
        return Err(Error::Invalid("empty decomposition".into()));
    }
    let mut sum = Form::zero(basis);
    for (c, psi) in &cert.decomposition {
        if !is_simple(psi, k)? {
            return Err(Error::NotSimple(psi.to_text()));
        }
        sum = &sum + &psi.wedge(&psi.conj())?.scale(c);
    }
    let residual = kk.checked_sub(&sum)?;
    if !residual.is_zero() {
        return Err(Error::Invalid(format!("(dβ)^({k},{k}) differs from the decomposition by {residual}")));
    }
    let c1 = &cert.decomposition[0].0;
    if c1.is_zero() {
        return Err(Error::Invalid("zero coefficient".into()));
    }
    if !c1.is_real() || c1.atoms().iter().any(Atom::is_pointwise) {
        return Err(Error::SignMixed(format!("leading coefficient {c1} is not a real constant")));
    }
    for (c, _) in &cert.decomposition[1..] {
        let ratio = c.checked_div(c1)?;
        if constant_sign(&ratio) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::SignMixed(format!("{c} / {c1} = {ratio}")));
        }
    }
    let params = params_of(c1);
    let (sign, nonvanishing, witness) = if params.is_empty() {
        let s = match constant_sign(c1) {
            Some(std::cmp::Ordering::Less) => -1,
            _ => 1,
        };
        (s, "always".to_string(), None)
    } else {
        let mut at = c1.clone();
        for v in &params {
            at = at.subs(v, &Expr::ratio(1, 2))?;
        }
        if at.is_zero() {
            return Err(Error::Invalid(format!("{c1} vanishes at the witness point")));
        }
        let s = if constant_sign(&at) == Some(std::cmp::Ordering::Less) { -1 } else { 1 };
        (s, format!("{} != 0", c1.numerator()), Some(at.to_string()))
    };
    let verdict = if p == n - 1 {
        "no almost p-Kähler form (in particular no semi-Kähler metric)".to_string()
    } else {
        "no almost p-Kähler form".to_string()
    };
    Ok(NopReport {
        n,
        p,
        d_beta: d_beta.to_text(),
        coefficients: cert.decomposition.iter().map(|(c, _)| c.to_string()).collect(),
        sign,
        nonvanishing,
        witness,
        verdict,
    })
}
