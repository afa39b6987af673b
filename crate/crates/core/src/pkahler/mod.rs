//! Positivity of real (p,p)-forms, transversality certificates, and the
//! almost p-Kähler, Kähler, and balanced predicates.

mod upoly;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Basis, Coframe, Form, Frame, Matrix, Word};
use crate::symexpr::{Assignment, Expr, FnTable, GaussRat, NoFunctions, Var};

pub use upoly::{root_free_interval, ParamRange, UPoly};

/// Default sample count for the decomposable-covector search.
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Seed used when neither the caller nor `PKLAB_SEED` supplies one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// `σ_p = i^{p²} 2^{-p}`.
pub fn sigma_vol(p: usize) -> Expr {
    let ip = GaussRat::i_pow((p * p) as i64);
    let two = GaussRat::from_int(2).pow(p as u32);
    Expr::constant(&ip / &two)
}

/// `Vol = Π_j (i/2) φ^j ∧ φ̄^j` over a complex basis.
pub fn vol(basis: &Arc<Basis>) -> Result<Form> {
    if !basis.is_complex() {
        return Err(Error::TypeMismatch("volume form needs a complex coframe basis".into()));
    }
    let half_i = Expr::i() * Expr::ratio(1, 2);
    let mut v = Form::scalar(basis, Expr::one());
    for j in basis.holomorphic() {
        v = v.wedge(&Form::monomial(basis, &[j, basis.conj_index(j)], half_i.clone()))?;
    }
    Ok(v)
}

/// The coefficient `a` with `f = a · Vol` for a top-degree form.
pub fn vol_coefficient(f: &Form) -> Result<Expr> {
    let v = vol(f.basis())?;
    let (w, c) = v.terms().next().expect("volume form has one term");
    if f.terms().any(|(u, _)| u != w) {
        return Err(Error::TypeMismatch(format!("{f} is not a top-degree form")));
    }
    Ok(f.coeff(w).checked_div(c)?)
}

fn holo_word(basis: &Arc<Basis>, idx: &[usize]) -> Form {
    Form::monomial(basis, idx, Expr::one())
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn check_real_pp(omega: &Form) -> Result<usize> {
    let basis = omega.basis();
    if !basis.is_complex() {
        return Err(Error::TypeMismatch("Ω must be written in a complex coframe".into()));
    }
    let deg = if omega.is_zero() { 0 } else { omega.degree()? };
    if deg % 2 == 1 {
        return Err(Error::TypeMismatch(format!("{omega} has odd degree")));
    }
    let p = deg / 2;
    if !omega.is_pure(p, p)? {
        return Err(Error::TypeMismatch(format!("{omega} is not of type ({p},{p})")));
    }
    if !omega.is_real() {
        return Err(Error::TypeMismatch(format!("{omega} is not real")));
    }
    Ok(p)
}

/// The coefficient of `Ω ∧ σ_{n-p} ψ ∧ ψ̄` against `Vol`.
pub fn transversality_pairing(omega: &Form, psi: &Form) -> Result<Expr> {
    if !Basis::same(omega.basis(), psi.basis()) {
        return Err(Error::BasisMismatch);
    }
    let p = check_real_pp(omega)?;
    let n = omega.basis().dim() / 2;
    if !psi.is_pure(n - p, 0)? {
        return Err(Error::TypeMismatch(format!("{psi} is not of type ({},0)", n - p)));
    }
    let top = omega.wedge(&psi.wedge(&psi.conj())?.scale(&sigma_vol(n - p)))?;
    vol_coefficient(&top)
}

/// Rows index `(n-p)`-subsets `I` of the holomorphic covectors; the matrix
/// satisfies `pairing(Σ a_I φ^I) = Σ H_{IJ} a_I ā_J`.
pub fn hermitian_form(omega: &Form) -> Result<(Vec<Vec<usize>>, Matrix)> {
    let p = check_real_pp(omega)?;
    let basis = omega.basis();
    let n = basis.dim() / 2;
    let words = subsets(&basis.holomorphic(), n - p);
    let sigma = sigma_vol(n - p);
    let mut h = Matrix::zeros(words.len(), words.len());
    for (a, i) in words.iter().enumerate() {
        let left = omega.wedge(&holo_word(basis, i))?;
        for (b, j) in words.iter().enumerate() {
            let right = holo_word(basis, j).conj().scale(&sigma);
            h.set(a, b, vol_coefficient(&left.wedge(&right)?)?);
        }
    }
    Ok((words, h))
}

/// Leading principal minors.
pub fn leading_minors(h: &Matrix) -> Vec<Expr> {
    (1..=h.rows()).map(|k| h.minor(&(0..k).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    TransverseExact,
    TransverseSampled,
    NotTransverse,
    Inconclusive,
}

/// A simple covector with non-positive pairing.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub form: String,
    /// Exact pairing when available, otherwise its floating value.
    pub pairing: String,
    #[serde(skip)]
    pub psi: Option<Form>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    pub verdict: Verdict,
    pub method: String,
    pub minors: Vec<String>,
    pub certified_range: Option<ParamRange>,
    pub margin: Option<f64>,
    pub witness: Option<Witness>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl TransversalityReport {
    pub fn is_transverse(&self) -> bool {
        matches!(self.verdict, Verdict::TransverseExact | Verdict::TransverseSampled)
    }
}

/// Inputs for [`is_transverse`] beyond the form itself.
#[derive(Clone, Debug)]
pub struct TransverseOptions {
    /// Exact substitutions applied before deciding (e.g. a parameter value).
    pub subs: Vec<(Var, Expr)>,
    /// A numeric point for forms whose coefficients vary over the manifold.
    pub point: Option<Assignment>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for TransverseOptions {
    fn default() -> Self {
        TransverseOptions { subs: Vec::new(), point: None, samples: DEFAULT_SAMPLES, seed: seed_from_env() }
    }
}

/// `PKLAB_SEED` if set and numeric, otherwise [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("PKLAB_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub(crate) fn constant_sign(e: &Expr) -> Option<std::cmp::Ordering> {
    let c = e.as_constant()?;
    if !c.is_real() {
        return None;
    }
    Some(c.re.cmp(&BigRational::zero()))
}

fn exact_witness(words: &[Vec<usize>], h: &Matrix, basis: &Arc<Basis>) -> Option<Witness> {
    let num = h.eval(&Assignment::new(), &NoFunctions).ok()?;
    let candidate = |a: &[GaussRat]| -> Option<Witness> {
        let mut val = GaussRat::zero();
        for i in 0..a.len() {
            for j in 0..a.len() {
                let hij = h.get(i, j).as_constant()?;
                val += &(&(&hij * &a[i]) * &a[j].conj());
            }
        }
        if val.is_real() && !val.re.is_positive() && a.iter().any(|x| !x.is_zero()) {
            let psi = words
                .iter()
                .zip(a)
                .fold(Form::zero(basis), |acc, (w, c)| &acc + &holo_word(basis, w).scale(&Expr::constant(c.clone())));
            Some(Witness { form: psi.to_text(), pairing: val.to_string(), psi: Some(psi) })
        } else {
            None
        }
    };
    for i in 0..words.len() {
        let mut a = vec![GaussRat::zero(); words.len()];
        a[i] = GaussRat::one();
        if let Some(w) = candidate(&a) {
            return Some(w);
        }
    }
    let eig = num.symmetric_eigen();
    let k = (0..eig.eigenvalues.len()).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))?;
    let scale = 1u64 << 24;
    let to_rat = |x: f64| BigRational::new(BigInt::from((x * scale as f64).round() as i64), BigInt::from(scale));
    let a: Vec<GaussRat> =
        (0..words.len()).map(|i| GaussRat::new(to_rat(eig.eigenvectors[(i, k)].re), to_rat(eig.eigenvectors[(i, k)].im))).collect();
    candidate(&a)
}

fn sample(
    words: &[Vec<usize>],
    hnum: &DMatrix<Complex64>,
    n: usize,
    k: usize,
    opts: &TransverseOptions,
    basis: &Arc<Basis>,
    holo: &[usize],
) -> TransversalityReport {
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for s in 0..opts.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64);
        let alpha: Vec<Vec<Complex64>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        // Plücker coordinates of α_1 ∧ … ∧ α_k in the basis of k-subsets
        let mut a: Vec<Complex64> = words
            .iter()
            .map(|w| {
                let pos: Vec<usize> = w.iter().map(|x| holo.iter().position(|y| y == x).unwrap()).collect();
                DMatrix::from_fn(k, k, |r, c| alpha[r][pos[c]]).determinant()
            })
            .collect();
        let norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        a.iter_mut().for_each(|x| *x /= norm);
        let mut val = Complex64::new(0.0, 0.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                val += hnum[(i, j)] * a[i] * a[j].conj();
            }
        }
        if val.re < margin {
            margin = val.re;
            if val.re <= 0.0 && witness.is_none() {
                let psi = alpha.iter().fold(Form::scalar(basis, Expr::one()), |acc, al| {
                    let one = holo.iter().zip(al).fold(Form::zero(basis), |f, (&j, c)| {
                        &f + &Form::covector(basis, j).scale(&c64_expr(*c))
                    });
                    acc.wedge(&one).expect("same basis")
                });
                witness = Some(Witness { form: psi.to_text(), pairing: format!("{:e}", val.re), psi: Some(psi) });
            }
        }
    }
    let verdict = if witness.is_some() { Verdict::NotTransverse } else { Verdict::TransverseSampled };
    TransversalityReport {
        verdict,
        method: "sampling".into(),
        minors: Vec::new(),
        certified_range: None,
        margin: Some(margin),
        witness,
        seed: Some(opts.seed),
        samples: Some(opts.samples),
    }
}

fn c64_expr(c: Complex64) -> Expr {
    let scale = 1i64 << 20;
    let r = |x: f64| BigRational::new(BigInt::from((x * scale as f64).round() as i64), BigInt::from(scale));
    Expr::constant(GaussRat::new(r(c.re), r(c.im)))
}

fn single_real_parameter(exprs: &[Expr]) -> Option<Var> {
    let mut found: Option<Var> = None;
    for e in exprs {
        for v in e.vars() {
            if !v.is_parameter() || !v.is_real() {
                return None;
            }
            if found.as_ref().is_some_and(|f| *f != v) {
                return None;
            }
            found = Some(v);
        }
        if e.atoms().iter().any(|a| matches!(a, crate::symexpr::Atom::Fn(_))) {
            return None;
        }
    }
    found
}

/// Transversality of a real (p,p)-form written in a complex coframe.
///
/// When every simple `(n-p)`-covector is a point of the full space
/// `Λ^{n-p}` (that is `n-p ≤ 1` or `n-p ≥ n-1`) the minor test is exact in
/// both directions. Otherwise positive minors certify transversality and a
/// failure falls back to sampling simple covectors.
pub fn is_transverse(omega: &Form, opts: &TransverseOptions, table: &dyn FnTable) -> Result<TransversalityReport> {
    let p = check_real_pp(omega)?;
    let basis = omega.basis().clone();
    let n = basis.dim() / 2;
    let k = n - p;
    let all_simple = k <= 1 || k + 1 >= n;
    let (words, mut h) = hermitian_form(omega)?;
    for (v, val) in &opts.subs {
        let mut next = Matrix::zeros(h.rows(), h.cols());
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                next.set(i, j, h.get(i, j).subs(v, val)?);
            }
        }
        h = next;
    }
    let minors = leading_minors(&h);
    let minor_text: Vec<String> = minors.iter().map(|m| m.to_string()).collect();
    let base = |verdict, method: &str| TransversalityReport {
        verdict,
        method: method.to_string(),
        minors: minor_text.clone(),
        certified_range: None,
        margin: None,
        witness: None,
        seed: None,
        samples: None,
    };
    let method = if all_simple { "hermitian-minors" } else { "full-space-minors" };

    if minors.iter().all(|m| m.as_constant().is_some()) {
        let positive = minors.iter().all(|m| constant_sign(m) == Some(std::cmp::Ordering::Greater));
        if positive {
            let mut r = base(Verdict::TransverseExact, method);
            r.margin = h.eval(&Assignment::new(), &NoFunctions).ok().map(|m| m.symmetric_eigen().eigenvalues.min());
            return Ok(r);
        }
        if all_simple {
            let mut r = base(Verdict::NotTransverse, method);
            r.witness = exact_witness(&words, &h, &basis);
            if r.witness.is_none() {
                r.verdict = Verdict::Inconclusive;
            }
            return Ok(r);
        }
        let hnum = h.eval(&Assignment::new(), &NoFunctions)?;
        let mut r = sample(&words, &hnum, n, k, opts, &basis, &basis.holomorphic());
        r.minors = minor_text;
        return Ok(r);
    }

    if let Some(param) = single_real_parameter(&minors) {
        let center = match &opts.point {
            Some(at) => at.get(&param).map(|c| rational_approx(c.re)),
            None => Some(BigRational::zero()),
        };
        let center = center.unwrap_or_else(BigRational::zero);
        let mut polys = Vec::new();
        for m in &minors {
            polys.extend(UPoly::factors_of(m, &param).expect("single real parameter"));
        }
        let at_center_positive = minors.iter().all(|m| {
            let v = m.subs(&param, &Expr::constant(GaussRat::real(center.clone()))).ok();
            v.as_ref().and_then(constant_sign) == Some(std::cmp::Ordering::Greater)
        });
        let range = root_free_interval(&polys, &param, &center);
        let mut r = base(if at_center_positive { Verdict::TransverseExact } else { Verdict::Inconclusive }, method);
        if at_center_positive {
            r.certified_range = Some(range);
        }
        return Ok(r);
    }

    if let Some(at) = &opts.point {
        let hnum = h.eval(at, table)?;
        let mut r = sample(&words, &hnum, n, k, opts, &basis, &basis.holomorphic());
        r.minors = minor_text;
        return Ok(r);
    }
    Ok(base(Verdict::Inconclusive, method))
}

fn rational_approx(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Conjunct-by-conjunct report for the almost p-Kähler condition.
#[derive(Clone, Debug, Serialize)]
pub struct PKahlerReport {
    pub p: usize,
    pub real: bool,
    pub pure: bool,
    pub closed: bool,
    pub d_omega: String,
    pub transverse: Option<TransversalityReport>,
}

impl PKahlerReport {
    pub fn holds(&self) -> bool {
        self.real && self.pure && self.closed && self.transverse.as_ref().is_some_and(|t| t.is_transverse())
    }
}

/// Real, pure `(p,p)` with respect to the coframe's structure, closed, and
/// transverse. `omega` lives over the frame's basis and `cf` is a coframe
/// with that basis as parent.
pub fn is_almost_p_kahler(
    omega: &Form,
    frame: &Frame,
    cf: &Coframe,
    opts: &TransverseOptions,
    table: &dyn FnTable,
) -> Result<PKahlerReport> {
    if !Basis::same(omega.basis(), frame.basis()) || !Basis::same(cf.parent(), frame.basis()) {
        return Err(Error::BasisMismatch);
    }
    let deg = omega.degree()?;
    let p = deg / 2;
    let real = omega.is_real();
    let in_cf = cf.to_coframe(omega)?;
    let pure = deg % 2 == 0 && in_cf.is_pure(p, p)?;
    let d_omega = frame.d(omega)?;
    let transverse = if real && pure { Some(is_transverse(&in_cf, opts, table)?) } else { None };
    Ok(PKahlerReport { p, real, pure, closed: d_omega.is_zero(), d_omega: d_omega.to_text(), transverse })
}

/// `h_{jk}` with `ω = (i/2) Σ h_{jk} φ^j ∧ φ̄^k`, for ω written in a complex coframe.
pub fn hermitian_matrix_11(omega: &Form) -> Result<Matrix> {
    let basis = omega.basis();
    if !omega.is_zero() && (omega.degree()? != 2 || !omega.is_pure(1, 1)?) {
        return Err(Error::TypeMismatch(format!("{omega} is not a (1,1)-form")));
    }
    let holo = basis.holomorphic();
    let factor = Expr::constant(GaussRat::new(BigRational::zero(), BigRational::from_integer(BigInt::from(-2))));
    Ok(Matrix::from_fn(holo.len(), holo.len(), |j, k| {
        let (sign, w) = Word::from_indices(&[holo[j], basis.conj_index(holo[k])]).expect("distinct");
        &omega.coeff(w) * &factor * Expr::int(sign as i64)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    pub n: usize,
    /// Positivity of `(h_{jk})`; decided at the origin and at zero
    /// parameters when the entries are not constant.
    pub positive: bool,
    pub kahler: bool,
    pub balanced: bool,
    /// `dω^k = 0` for `k = 1..n-1`.
    pub closed_powers: Vec<bool>,
}

/// Kähler (`dω = 0`) and balanced/semi-Kähler (`dω^{n-1} = 0`) flags.
pub fn metric_predicates(omega: &Form, frame: &Frame, cf: &Coframe) -> Result<MetricReport> {
    let n = cf.n();
    let in_cf = cf.to_coframe(omega)?;
    if !omega.is_real() {
        return Err(Error::TypeMismatch(format!("{omega} is not real")));
    }
    let h = hermitian_matrix_11(&in_cf)?;
    let mut at_zero = h.map(|e| e.at_origin());
    let params: Vec<Var> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).flat_map(|(i, j)| at_zero.get(i, j).vars()).collect();
    for v in params {
        at_zero = at_zero.map(|e| e.subs(&v, &Expr::zero()).unwrap_or_else(|_| e.clone()));
    }
    let positive = leading_minors(&at_zero).iter().all(|m| constant_sign(m) == Some(std::cmp::Ordering::Greater));
    if !positive {
        return Err(Error::NotPositive(format!("hermitian matrix {at_zero}")));
    }
    let mut closed_powers = Vec::new();
    let mut power = omega.clone();
    for k in 1..n {
        if k > 1 {
            power = power.wedge(omega)?;
        }
        closed_powers.push(frame.d(&power)?.is_zero());
    }
    let kahler = closed_powers.first().copied().unwrap_or(true);
    let balanced = closed_powers.last().copied().unwrap_or(true);
    Ok(MetricReport { n, positive, kahler, balanced, closed_powers })
}

/// `Σ_j (i/2) φ^j ∧ φ̄^j` over a complex basis.
pub fn standard_omega(basis: &Arc<Basis>) -> Form {
    let half_i = Expr::i() * Expr::ratio(1, 2);
    basis
        .holomorphic()
        .into_iter()
        .fold(Form::zero(basis), |acc, j| &acc + &Form::monomial(basis, &[j, basis.conj_index(j)], half_i.clone()))
}

/// Exact positivity of a constant rational value, as used by claim checks.
pub fn is_positive_constant(e: &Expr) -> bool {
    constant_sign(e) == Some(std::cmp::Ordering::Greater)
}

#[cfg(test)]
mod tests;
