use serde::Serialize;

use super::ManifoldSpec;
use crate::acs::integrability_defect;
use crate::deform::semi_kahler_first_order_check;
use crate::dsl::load::Val;
use crate::dsl::{print_expr, Ast, ClaimDecl};
use crate::exterior::Form;
use crate::obstruct::{constant_multiple, invariant_dbar_class, invariant_taming_solver, mt_obstruction, nop_test};
use crate::obstruct::{NopCertificate, Ordering6, TamingVerdict};
use crate::pkahler::{is_almost_p_kahler, metric_predicates, seed_from_env, TransverseOptions};
use crate::symexpr::{Expr, NoFunctions, Var};

#[derive(Clone, Debug, Serialize)]
pub struct ClaimOutcome {
    pub id: String,
    pub kind: String,
    pub provenance: &'static str,
    pub reference: String,
    pub passed: bool,
    /// What was computed.
    pub detail: String,
    /// The nonzero difference behind a failure, when there is one.
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimsReport {
    pub schema: u32,
    pub spec: String,
    pub passed: usize,
    pub failed: usize,
    pub claims: Vec<ClaimOutcome>,
}

impl ClaimsReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Run every claim of a spec in declaration order.
pub fn run_claims(spec: &ManifoldSpec) -> ClaimsReport {
    let claims: Vec<ClaimOutcome> = spec.claims.iter().map(|c| run_claim(spec, c)).collect();
    let passed = claims.iter().filter(|c| c.passed).count();
    ClaimsReport { schema: 1, spec: spec.name.clone(), passed, failed: claims.len() - passed, claims }
}

struct Check {
    passed: bool,
    detail: String,
    residual: Option<String>,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Check {
        Check { passed, detail: detail.into(), residual: None }
    }

    fn with_residual(passed: bool, detail: impl Into<String>, residual: String) -> Check {
        Check { passed, detail: detail.into(), residual: if passed { None } else { Some(residual) } }
    }
}

/// Run one claim; its `where` substitutions reload the spec first.
pub fn run_claim(spec: &ManifoldSpec, c: &ClaimDecl) -> ClaimOutcome {
    let outcome = |r: Result<Check, String>| {
        let (passed, detail, residual) = match r {
            Ok(ch) => (ch.passed, ch.detail, ch.residual),
            Err(e) => (false, format!("error: {e}"), None),
        };
        ClaimOutcome {
            id: c.id.clone(),
            kind: c.kind.clone(),
            provenance: c.provenance.keyword(),
            reference: c.provenance.text().to_string(),
            passed,
            detail,
            residual,
        }
    };
    if c.subs.is_empty() {
        return outcome(check(spec, c));
    }
    let local = match spec.with_subs(&c.subs) {
        Ok(s) => s,
        Err(d) => return outcome(Err(super::render(&d))),
    };
    let Some(sc) = local.claims.iter().find(|x| x.id == c.id).cloned() else {
        return outcome(Err("claim disappeared after substitution".into()));
    };
    outcome(check(&local, &sc))
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn form(spec: &ManifoldSpec, a: &Ast) -> Result<Form, String> {
    Ok(spec.eval(a).map_err(e)?.into_form(spec.frame.basis()))
}

fn scalar(spec: &ManifoldSpec, a: &Ast) -> Result<Expr, String> {
    match spec.eval(a).map_err(e)? {
        Val::Scalar(x) => Ok(x),
        Val::Form(f) if f.is_zero() => Ok(Expr::zero()),
        Val::Form(f) => Err(format!("expected a scalar, found {f}")),
    }
}

fn int(a: &Ast) -> Result<usize, String> {
    match a {
        Ast::Num(n) => n.to_string().parse().map_err(e),
        other => Err(format!("expected an integer, found {}", print_expr(other))),
    }
}

fn var(spec: &ManifoldSpec, a: &Ast) -> Result<Var, String> {
    match a {
        Ast::Ident(n, _) => spec.var(n).ok_or_else(|| format!("`{n}` is not a parameter")),
        other => Err(format!("expected a parameter name, found {}", print_expr(other))),
    }
}

fn first_param(spec: &ManifoldSpec, args: &[Ast]) -> Result<Var, String> {
    if let Some(a) = args.first() {
        return var(spec, a);
    }
    let fam = spec.family.as_ref().ok_or("no deformation declared")?;
    fam.params().first().cloned().ok_or_else(|| "the deformation has no parameters".into())
}

fn arity(c: &ClaimDecl, lo: usize, hi: usize) -> Result<(), String> {
    if c.args.len() < lo || c.args.len() > hi {
        return Err(format!("`{}` takes {lo}..={hi} arguments, got {}", c.kind, c.args.len()));
    }
    Ok(())
}

fn check(spec: &ManifoldSpec, c: &ClaimDecl) -> Result<Check, String> {
    let a = &c.args;
    let fr = &spec.frame;
    match c.kind.as_str() {
        "equal" => {
            arity(c, 2, 2)?;
            match (spec.eval(&a[0]).map_err(e)?, spec.eval(&a[1]).map_err(e)?) {
                (Val::Scalar(x), Val::Scalar(y)) => {
                    let r = &x - &y;
                    Ok(Check::with_residual(r.is_zero(), format!("{x}"), r.to_string()))
                }
                (x, y) => {
                    let (x, y) = (x.into_form(fr.basis()), y.into_form(fr.basis()));
                    let r = x.checked_sub(&y).map_err(e)?;
                    Ok(Check::with_residual(r.is_zero(), x.to_text(), r.to_text()))
                }
            }
        }
        "closed" | "not_closed" => {
            arity(c, 1, 1)?;
            let d = fr.d(&form(spec, &a[0])?).map_err(e)?;
            let want = c.kind == "closed";
            let mut ch = Check::new(d.is_zero() == want, format!("d = {}", d.to_text()));
            if want && !d.is_zero() {
                ch.residual = Some(d.to_text());
            }
            Ok(ch)
        }
        "closed_iff" => {
            arity(c, 2, 2)?;
            let d = fr.d(&form(spec, &a[0])?).map_err(e)?;
            let cond = scalar(spec, &a[1])?;
            if cond.is_zero() {
                return Err("the condition is identically zero".into());
            }
            let mut ok = !d.is_zero();
            let mut shape = Vec::new();
            for (w, coef) in d.terms() {
                match constant_multiple(coef, &cond) {
                    Some(k) if &k * &cond == *coef => shape.push(format!("{k} {}", d.word_name(w))),
                    _ => ok = false,
                }
            }
            Ok(Check::with_residual(ok, format!("d = ({cond}) * ({})", shape.join(" + ")), d.to_text()))
        }
        "jt_fixes" | "jt_acts" => {
            arity(c, if c.kind == "jt_fixes" { 1 } else { 2 }, 2)?;
            let f = form(spec, &a[0])?;
            let target = if a.len() == 2 { form(spec, &a[1])? } else { f.clone() };
            let j = spec.working_structure().map_err(e)?;
            let jf = j.act(&f).map_err(e)?;
            let r = jf.checked_sub(&target).map_err(e)?;
            Ok(Check::with_residual(r.is_zero(), format!("J = {}", jf.to_text()), r.to_text()))
        }
        "bidegree" => {
            arity(c, 3, 3)?;
            let f = form(spec, &a[0])?;
            let (p, q) = (int(&a[1])?, int(&a[2])?);
            let cf = spec.working_coframe().map_err(e)?;
            let in_cf = cf.to_coframe(&f).map_err(e)?;
            let types = in_cf.bidegrees().map_err(e)?;
            Ok(Check::new(in_cf.is_pure(p, q).map_err(e)?, format!("types {types:?}")))
        }
        "integrable" | "not_integrable" => {
            arity(c, 0, 0)?;
            let cf = &spec.base;
            let mut defect = Vec::new();
            for phi in cf.holomorphic() {
                let part = cf.to_coframe(&fr.d(&phi).map_err(e)?).map_err(e)?.bidegree_part(0, 2).map_err(e)?;
                if !part.is_zero() {
                    defect.push(part.to_text());
                }
            }
            let integrable = defect.is_empty();
            Ok(Check::new(integrable == (c.kind == "integrable"), format!("(0,2) parts: [{}]", defect.join(", "))))
        }
        "integrable_iff_zero" => {
            arity(c, 0, 0)?;
            let fam = spec.family.as_ref().ok_or("no deformation declared")?;
            let defect = integrability_defect(fam, fr).map_err(e)?;
            let nonzero = defect.iter().any(|f| !f.is_zero());
            let at = |v: Expr| -> Result<bool, String> {
                let mut all_zero = true;
                for f in &defect {
                    let mut g = f.clone();
                    for t in fam.params() {
                        g = g.subs(t, &v).map_err(e)?;
                    }
                    all_zero &= g.is_zero();
                }
                Ok(all_zero)
            };
            let zero_at_0 = at(Expr::zero())?;
            let zero_at_half = at(Expr::ratio(1, 2))?;
            let text: Vec<String> = defect.iter().filter(|f| !f.is_zero()).map(Form::to_text).collect();
            Ok(Check::new(
                nonzero && zero_at_0 && !zero_at_half,
                format!("(0,2) parts: [{}]; vanish at 0: {zero_at_0}; vanish at 1/2: {zero_at_half}", text.join(", ")),
            ))
        }
        "almost_pkahler" => {
            arity(c, 1, 1)?;
            let f = form(spec, &a[0])?;
            let cf = spec.working_coframe().map_err(e)?;
            let r = is_almost_p_kahler(&f, fr, &cf, &TransverseOptions::default(), &NoFunctions).map_err(e)?;
            let mut detail = format!("p = {}, real {}, pure {}, closed {}", r.p, r.real, r.pure, r.closed);
            if let Some(t) = &r.transverse {
                detail.push_str(&format!(", transverse {:?} via {}", t.verdict, t.method));
                if let Some(range) = &t.certified_range {
                    detail.push_str(&format!(", certified for {range}"));
                }
            }
            let residual = if r.closed { String::new() } else { r.d_omega.clone() };
            Ok(Check::with_residual(r.holds(), detail, residual))
        }
        "no_taming" => {
            arity(c, 1, 1)?;
            let word = print_expr(&a[0]);
            let cf = spec.working_coframe().map_err(e)?;
            let frame = spec.frame_on(&cf).map_err(e)?;
            let r = invariant_taming_solver(&frame, seed_from_env()).map_err(e)?;
            let t = &r.taming;
            Ok(Check::new(
                t.verdict == TamingVerdict::Impossible && t.forced_zero.contains(&word),
                format!("{:?}; closed invariant 2-forms: {}; forced to zero: {}", t.verdict, t.closed_dimension, t.forced_zero.join(", ")),
            ))
        }
        "balanced" | "not_kahler" | "kahler" => {
            arity(c, 1, 1)?;
            let f = form(spec, &a[0])?;
            let m = metric_predicates(&f, fr, &spec.base).map_err(e)?;
            let ok = match c.kind.as_str() {
                "balanced" => m.positive && m.balanced,
                "kahler" => m.positive && m.kahler,
                _ => !m.kahler,
            };
            Ok(Check::new(ok, format!("positive {}, kahler {}, balanced {}, closed powers {:?}", m.positive, m.kahler, m.balanced, m.closed_powers)))
        }
        "family_balanced" => {
            arity(c, 0, 0)?;
            let m = spec.metric.as_ref().ok_or("no deformation declared")?;
            let d = fr.d(&m.big_omega().map_err(e)?).map_err(e)?;
            Ok(Check::with_residual(d.is_zero(), format!("d(omega_t^{}) = {}", m.family().n() - 1, d.to_text()), d.to_text()))
        }
        "first_order_passes" | "first_order_fails" | "pdes_vanish" | "corollary" => {
            let m = spec.metric.as_ref().ok_or("no deformation declared")?;
            let (t, expected) = if c.kind == "corollary" {
                arity(c, 1, 2)?;
                let t = if a.len() == 2 { var(spec, &a[1])? } else { first_param(spec, &[])? };
                (t, Some(form(spec, &a[0])?))
            } else {
                arity(c, 0, 1)?;
                (first_param(spec, a)?, None)
            };
            let r = semi_kahler_first_order_check(m, fr, &t).map_err(e)?;
            match c.kind.as_str() {
                "first_order_passes" => Ok(Check::with_residual(r.passes, format!("residual {}", r.residual), r.residual.clone())),
                "first_order_fails" => Ok(Check::new(!r.passes, format!("residual {}", r.residual))),
                "pdes_vanish" => {
                    let pdes = r.pdes.clone().ok_or("the PDEs need n = 3 and a dz coframe")?;
                    Ok(Check::with_residual(r.pdes_vanish() == Some(true), format!("[{}]", pdes.join(", ")), pdes.join(", ")))
                }
                _ => {
                    let got = r.corollary_form.clone().ok_or("the corollary needs n = 3")?;
                    let want = m.family().base().to_coframe(&expected.unwrap()).map_err(e)?;
                    let res = got.checked_sub(&want).map_err(e)?;
                    Ok(Check::with_residual(res.is_zero(), got.to_text(), res.to_text()))
                }
            }
        }
        "dbar_nonexact" => {
            arity(c, 1, 1)?;
            let alpha = spec.base.to_coframe(&form(spec, &a[0])?).map_err(e)?;
            let frame = spec.frame_on(&spec.base).map_err(e)?;
            let r = invariant_dbar_class(&alpha, &frame).map_err(e)?;
            Ok(Check::new(!r.exact, format!("rank {}, augmented rank {}", r.rank, r.augmented_rank)))
        }
        "nop" => {
            arity(c, 2, 2)?;
            let p = int(&a[1])?;
            let cf = spec.working_coframe().map_err(e)?;
            let frame = spec.frame_on(&cf).map_err(e)?;
            let beta = cf.to_coframe(&form(spec, &a[0])?).map_err(e)?;
            let cert = NopCertificate::diagonal(beta, p, &frame).map_err(e)?;
            let r = nop_test(&cert, &frame, spec.compact).map_err(e)?;
            let mut detail = format!("{}; coefficients [{}]; sign {}; when {}", r.verdict, r.coefficients.join(", "), r.sign, r.nonvanishing);
            if let Some(w) = &r.witness {
                detail.push_str(&format!("; witness {w}"));
            }
            Ok(Check::new(true, detail))
        }
        "mt" => {
            if a.len() < 2 {
                return Err("`mt` takes an equation number, a target, and optional covectors".into());
            }
            let which = int(&a[0])?;
            let target = scalar(spec, &a[1])?.at_origin();
            let mut j = spec.structure().map_err(e)?;
            if a.len() > 2 {
                let keep: Vec<String> = a[2..].iter().map(print_expr).collect();
                let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
                j = j.restrict(&keep).map_err(e)?;
            }
            let coords: Vec<Var> = fr.coords().cloned().collect();
            let r = mt_obstruction(&j, &coords, Ordering6::Block).map_err(e)?;
            let eq = match which {
                1 => &r.eq1_expr,
                2 => &r.eq2_expr,
                _ => return Err("the equation number is 1 or 2".into()),
            };
            let k = if target.is_zero() { None } else { constant_multiple(eq, &target) };
            let ok = k.as_ref().is_some_and(|k| !k.is_zero() && &(k * &target) == eq);
            Ok(Check::new(ok, format!("eq1 = {}, eq2 = {}; target {target}", r.eq1, r.eq2)))
        }
        "acs_type10" => {
            let j = spec.acs.as_ref().ok_or("no acs block")?;
            let forms = a.iter().map(|x| form(spec, x)).collect::<Result<Vec<_>, _>>()?;
            Ok(Check::new(j.is_type_10(&forms).map_err(e)?, format!("{} forms against J", forms.len())))
        }
        "acs_matches_family" => {
            arity(c, 0, 0)?;
            let j = spec.acs.as_ref().ok_or("no acs block")?;
            if spec.family.is_none() && spec.member.is_none() {
                return Err("no deformation declared".into());
            }
            let jt = spec.working_structure().map_err(e)?;
            let diff = j.matrix().sub(jt.matrix());
            Ok(Check::with_residual(j.same_as(&jt), "J against J_t", diff.to_string()))
        }
        "d2" => {
            arity(c, 0, 0)?;
            fr.check_d2().map_err(e)?;
            spec.frame_on(&spec.base).map_err(e)?.check_d2().map_err(e)?;
            let cf = spec.working_coframe().map_err(e)?;
            spec.frame_on(&cf).map_err(e)?.check_d2().map_err(e)?;
            Ok(Check::new(true, "d∘d = 0 on every covector"))
        }
        other => Err(format!("unknown claim kind `{other}`")),
    }
}
