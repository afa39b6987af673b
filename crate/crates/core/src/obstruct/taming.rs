use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::linalg::{solve, LinearSolution};
use crate::exterior::{Form, Frame, Matrix, Word};
use crate::pkahler::{hermitian_matrix_11, is_positive_constant, leading_minors, standard_omega};
use crate::symexpr::{Expr, GaussRat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TamingVerdict {
    /// A closed invariant form with positive-definite `(1,1)` part exists.
    Found,
    /// Every closed invariant 2-form has some `φ^j∧φ̄^j` coefficient equal to zero.
    Impossible,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TamingSearch {
    pub unknowns: usize,
    pub closed_dimension: usize,
    /// Names `phi^j^phibar^j` whose coefficient vanishes on every closed form.
    pub forced_zero: Vec<String>,
    pub verdict: TamingVerdict,
    pub witness: Option<String>,
    #[serde(skip)]
    pub witness_form: Option<Form>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TamingReport {
    /// `ω(v, Jv) > 0`: the `(1,1)` part is positive, the rest is free.
    pub taming: TamingSearch,
    /// Additionally `J`-invariant: the form is of pure type `(1,1)`.
    pub compatible: TamingSearch,
    pub note: &'static str,
}

const NOTE: &str = "invariant forms only; for compact quotients of unimodular groups, averaging \
                    an arbitrary taming form yields an invariant one";

/// Search for closed invariant real 2-forms taming the structure whose
/// `(1,0)` covectors are the holomorphic covectors of `frame`.
///
/// `dω̂ = 0` is solved exactly over all invariant 2-forms; the open
/// positivity condition is then decided by a forced-zero certificate or by an
/// exactly verified witness.
pub fn invariant_taming_solver(frame: &Frame, seed: u64) -> Result<TamingReport> {
    let basis = frame.basis();
    if !basis.is_complex() {
        return Err(Error::TypeMismatch("taming needs a complex coframe".into()));
    }
    let dim = basis.dim();
    let all: Vec<Word> = (0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| Word::from_indices(&[a, b]).unwrap().1))
        .collect();
    let taming = search(frame, &all, seed)?;
    let mixed: Vec<Word> = all.iter().copied().filter(|&w| Form::word_bidegree(basis, w) == Some((1, 1))).collect();
    let compatible = search(frame, &mixed, seed)?;
    Ok(TamingReport { taming, compatible, note: NOTE })
}

fn search(frame: &Frame, words: &[Word], seed: u64) -> Result<TamingSearch> {
    let basis = frame.basis();
    let mut rows: Vec<Word> = Vec::new();
    let mut images = Vec::new();
    for &w in words {
        let dw = frame.d(&Form::from_terms(basis, [(w, Expr::one())]))?;
        for (u, e) in dw.terms() {
            if e.atoms().iter().any(|a| a.is_pointwise()) {
                return Err(Error::PointDependentCoefficient(e.to_string()));
            }
            if !rows.contains(&u) {
                rows.push(u);
            }
        }
        images.push(dw);
    }
    let a = Matrix::from_fn(rows.len(), words.len(), |r, c| images[c].coeff(rows[r]));
    let kernel = match solve(&a, &vec![Expr::zero(); rows.len()])? {
        LinearSolution::Solved { kernel, .. } => kernel,
        LinearSolution::Inconsistent { .. } => unreachable!("homogeneous system"),
    };
    let form_of = |v: &[Expr]| Form::from_terms(basis, words.iter().copied().zip(v.iter().cloned()));
    let kernel_forms: Vec<Form> = kernel.iter().map(|v| form_of(v)).collect();
    let mut forced_zero = Vec::new();
    for j in basis.holomorphic() {
        let w = Word::from_indices(&[j, basis.conj_index(j)]).unwrap().1;
        if kernel_forms.iter().all(|f| f.coeff(w).is_zero()) {
            forced_zero.push(Form::zero(basis).word_name(w));
        }
    }
    let mut out = TamingSearch {
        unknowns: words.len(),
        closed_dimension: kernel.len(),
        forced_zero,
        verdict: TamingVerdict::Inconclusive,
        witness: None,
        witness_form: None,
    };
    if !out.forced_zero.is_empty() {
        out.verdict = TamingVerdict::Impossible;
        return Ok(out);
    }
    let standard = standard_omega(basis);
    if frame.d(&standard)?.is_zero() {
        return Ok(found(out, standard));
    }
    // real closed forms: Re F and Re(iF) for F in the kernel
    let reals: Vec<Form> = kernel_forms.iter().flat_map(|f| [f.re(), f.scale(&Expr::i()).re()]).collect();
    let mats: Vec<Matrix> = reals.iter().map(|f| hermitian_matrix_11(&f.bidegree_part(1, 1)?)).collect::<Result<_>>()?;
    let mut numeric: Vec<DMatrix<Complex64>> = Vec::new();
    for m in &mats {
        match m.eval(&crate::symexpr::Assignment::new(), &crate::symexpr::NoFunctions) {
            Ok(x) => numeric.push(x),
            // parameters or functions left symbolic
            Err(_) => return Ok(out),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..4000 {
        let weights: Vec<f64> = if attempt < numeric.len() {
            (0..numeric.len()).map(|i| if i == attempt { 1.0 } else { 0.0 }).collect()
        } else {
            (0..numeric.len()).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        for sign in [1.0, -1.0] {
            let n = basis.holomorphic().len();
            let mut h = DMatrix::<Complex64>::zeros(n, n);
            for (w, m) in weights.iter().zip(&numeric) {
                h += m * Complex64::new(sign * w, 0.0);
            }
            if h.clone().cholesky().is_none() {
                continue;
            }
            let mut candidate = Form::zero(basis);
            for (w, f) in weights.iter().zip(&reals) {
                let q = BigRational::from_f64((sign * w * 64.0).round() / 64.0).unwrap_or_default();
                if !num_traits::Zero::is_zero(&q) {
                    candidate = &candidate + &f.scale(&Expr::constant(GaussRat::real(q)));
                }
            }
            if is_taming(frame, &candidate)? {
                return Ok(found(out, candidate));
            }
        }
    }
    Ok(out)
}

fn is_taming(frame: &Frame, f: &Form) -> Result<bool> {
    if f.is_zero() || !f.is_real() || !frame.d(f)?.is_zero() {
        return Ok(false);
    }
    let h = hermitian_matrix_11(&f.bidegree_part(1, 1)?)?;
    Ok(leading_minors(&h).iter().all(is_positive_constant))
}

fn found(mut out: TamingSearch, f: Form) -> TamingSearch {
    out.verdict = TamingVerdict::Found;
    out.witness = Some(f.to_text());
    out.witness_form = Some(f);
    out
}
